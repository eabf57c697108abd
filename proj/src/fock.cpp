#include "ngsat/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

namespace ngsat {

namespace {

double sum_negative(const Eigen::VectorXd& eigenvalues) {
  double total = 0.0;
  for (double v : eigenvalues) {
    if (v < -kTolEig) total += v;
  }
  return -total;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() == 1) return Eigen::VectorXd::Constant(1, m(0, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver failed to converge");
  }
  return solver.eigenvalues();
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

void Truncation::validate() const {
  if (n_b < 1 || n_d < 1 || n_e < 1) {
    throw std::invalid_argument("truncation levels must all be >= 1");
  }
}

Truncation Truncation::with_addition_headroom() const {
  Truncation t = *this;
  t.n_b = std::max(n_b, n_d + 1);
  t.n_e = std::max(n_e, n_d + 1);
  return t;
}

TripartiteAmplitudes::TripartiteAmplitudes(Truncation dims, int supermode_index)
    : dims_(dims), supermode_index_(supermode_index) {
  dims_.validate();
  if (supermode_index < 1) throw std::invalid_argument("supermode index must be >= 1");
}

void TripartiteAmplitudes::add(int b, int d, int e, double amp) {
  if (b < 0 || d < 0 || e < 0 || b > dims_.n_b || d > dims_.n_d || e > dims_.n_e) {
    throw std::out_of_range("occupation (" + std::to_string(b) + "," + std::to_string(d) + "," +
                            std::to_string(e) + ") outside truncation");
  }
  if (!std::isfinite(amp)) throw std::domain_error("non-finite amplitude");
  entries_.push_back({b, d, e, amp});
}

double TripartiteAmplitudes::amplitude(int b, int d, int e) const {
  double total = 0.0;
  for (const auto& x : entries_) {
    if (x.b == b && x.d == d && x.e == e) total += x.amp;
  }
  return total;
}

double TripartiteAmplitudes::squared_norm() const {
  double total = 0.0;
  for (const auto& x : entries_) total += x.amp * x.amp;
  return total;
}

double TripartiteAmplitudes::tail_mass() const {
  const double norm = squared_norm();
  if (norm <= 0.0) return 0.0;
  double top_b = 0.0, top_d = 0.0, top_e = 0.0;
  for (const auto& x : entries_) {
    const double w = x.amp * x.amp;
    if (x.b == dims_.n_b) top_b += w;
    if (x.d == dims_.n_d) top_d += w;
    if (x.e == dims_.n_e) top_e += w;
  }
  return std::max({top_b, top_d, top_e}) / norm;
}

bool TripartiteAmplitudes::on_single_line(int* offset) const {
  if (entries_.empty()) {
    if (offset) *offset = 0;
    return true;
  }
  const int s = entries_.front().b - entries_.front().d + entries_.front().e;
  for (const auto& x : entries_) {
    if (x.b - x.d + x.e != s) return false;
  }
  if (offset) *offset = s;
  return true;
}

void TripartiteAmplitudes::compact() {
  std::sort(entries_.begin(), entries_.end(), [](const FockEntry& l, const FockEntry& r) {
    return std::tie(l.e, l.d, l.b) < std::tie(r.e, r.d, r.b);
  });
  std::vector<FockEntry> merged;
  merged.reserve(entries_.size());
  for (const auto& x : entries_) {
    if (!merged.empty() && merged.back().b == x.b && merged.back().d == x.d &&
        merged.back().e == x.e) {
      merged.back().amp += x.amp;
    } else {
      merged.push_back(x);
    }
  }
  std::erase_if(merged, [](const FockEntry& x) { return x.amp == 0.0; });
  entries_ = std::move(merged);
}

DensityMatrix::DensityMatrix(int dim_b, int dim_d)
    : DensityMatrix(dim_b, dim_d, Eigen::MatrixXd::Zero(dim_b * dim_d, dim_b * dim_d)) {}

DensityMatrix::DensityMatrix(int dim_b, int dim_d, Eigen::MatrixXd elements)
    : dim_b_(dim_b), dim_d_(dim_d), elements_(std::move(elements)) {
  if (dim_b < 1 || dim_d < 1) throw std::invalid_argument("density matrix dimensions must be >= 1");
  const auto n = static_cast<Eigen::Index>(dim_b) * dim_d;
  if (elements_.rows() != n || elements_.cols() != n) {
    throw std::invalid_argument("density matrix elements do not match dim_b * dim_d");
  }
}

DensityMatrix DensityMatrix::normalized() const {
  const double t = trace();
  if (!(t > 0.0)) throw std::domain_error("cannot normalize a density matrix with zero trace");
  return DensityMatrix(dim_b_, dim_d_, elements_ / t);
}

double DensityMatrix::min_eigenvalue() const {
  return symmetric_eigenvalues(elements_).minCoeff();
}

DensityMatrix trace_out_environment(const TripartiteAmplitudes& state) {
  const auto& t = state.dims();
  const std::size_t dim = static_cast<std::size_t>(t.dim_b()) * static_cast<std::size_t>(t.dim_d());
  if (dim > kMaxDenseDim) {
    throw std::length_error("flattened B x D dimension " + std::to_string(dim) +
                            " exceeds dense limit; check the truncation");
  }
  DensityMatrix rho(t.dim_b(), t.dim_d());
  std::vector<FockEntry> sorted(state.entries().begin(), state.entries().end());
  std::sort(sorted.begin(), sorted.end(),
            [](const FockEntry& l, const FockEntry& r) { return l.e < r.e; });
  auto& m = rho.elements();
  for (std::size_t lo = 0; lo < sorted.size();) {
    std::size_t hi = lo;
    while (hi < sorted.size() && sorted[hi].e == sorted[lo].e) ++hi;
    for (std::size_t i = lo; i < hi; ++i) {
      const int row = rho.index(sorted[i].b, sorted[i].d);
      for (std::size_t j = lo; j < hi; ++j) {
        m(row, rho.index(sorted[j].b, sorted[j].d)) += sorted[i].amp * sorted[j].amp;
      }
    }
    lo = hi;
  }
  return rho;
}

DensityMatrix partial_transpose_d(const DensityMatrix& rho) {
  DensityMatrix out(rho.dim_b(), rho.dim_d());
  auto& m = out.elements();
  const auto& src = rho.elements();
  for (int b = 0; b < rho.dim_b(); ++b)
    for (int d = 0; d < rho.dim_d(); ++d)
      for (int bp = 0; bp < rho.dim_b(); ++bp)
        for (int dp = 0; dp < rho.dim_d(); ++dp)
          m(rho.index(b, dp), rho.index(bp, d)) = src(rho.index(b, d), rho.index(bp, dp));
  return out;
}

DensityMatrix partial_transpose_b(const DensityMatrix& rho) {
  DensityMatrix out(rho.dim_b(), rho.dim_d());
  auto& m = out.elements();
  const auto& src = rho.elements();
  for (int b = 0; b < rho.dim_b(); ++b)
    for (int d = 0; d < rho.dim_d(); ++d)
      for (int bp = 0; bp < rho.dim_b(); ++bp)
        for (int dp = 0; dp < rho.dim_d(); ++dp)
          m(rho.index(bp, d), rho.index(b, dp)) = src(rho.index(b, d), rho.index(bp, dp));
  return out;
}

double negative_eigenvalue_sum(const DensityMatrix& rho) {
  const auto& m = rho.elements();
  const int n = static_cast<int>(m.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      if (m(i, j) != 0.0 || m(j, i) != 0.0) {
        const int ri = find_root(parent, i);
        const int rj = find_root(parent, j);
        if (ri != rj) parent[ri] = rj;
      }
    }
  }
  std::vector<std::vector<int>> components(n);
  for (int i = 0; i < n; ++i) components[find_root(parent, i)].push_back(i);

  double total = 0.0;
  for (const auto& idx : components) {
    if (idx.empty()) continue;
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd block(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) block(r, c) = m(idx[r], idx[c]);
    total += sum_negative(symmetric_eigenvalues(block));
  }
  return total;
}

double line_state_negativity(const TripartiteAmplitudes& state) {
  int offset = 0;
  if (!state.on_single_line(&offset)) {
    throw std::invalid_argument("line_state_negativity needs b - d + e constant over the state");
  }
  const double norm = state.squared_norm();
  if (!(norm > 0.0)) throw std::domain_error("negativity of a zero state is undefined");

  const auto& t = state.dims();
  // slices[e][d] = amp(d - e + offset, d, e)
  std::vector<std::vector<double>> slices(t.dim_e(), std::vector<double>(t.dim_d(), 0.0));
  for (const auto& x : state.entries()) slices[x.e][x.d] += x.amp;

  const int n_blocks = t.n_b + t.n_d + 1;
  std::vector<Eigen::MatrixXd> blocks(n_blocks);
  auto row_min = [&](int total) { return std::max(0, total - t.n_d); };
  auto block_size = [&](int total) { return std::min(t.n_b, total) - row_min(total) + 1; };

  std::vector<int> support;
  for (int e = 0; e < t.dim_e(); ++e) {
    const auto& v = slices[e];
    support.clear();
    for (int d = 0; d < t.dim_d(); ++d)
      if (v[d] != 0.0) support.push_back(d);
    for (int d : support) {
      const int b = d - e + offset;
      for (int dp : support) {
        const int bp = dp - e + offset;
        const int total = b + dp;
        auto& blk = blocks[total];
        if (blk.size() == 0) blk = Eigen::MatrixXd::Zero(block_size(total), block_size(total));
        blk(b - row_min(total), bp - row_min(total)) += v[d] * v[dp] / norm;
      }
    }
  }

  double total = 0.0;
  for (const auto& blk : blocks) {
    if (blk.size() == 0) continue;
    total += sum_negative(symmetric_eigenvalues(blk));
  }
  return total;
}

Eigen::MatrixXd ladder_matrix(int dim) {
  if (dim < 2) throw std::invalid_argument("ladder_matrix needs dim >= 2");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

}  // namespace ngsat
