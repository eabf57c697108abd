#include "ngsat/nongauss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace ngsat {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::None: return "none";
    case OpKind::Catalysis: return "catalysis";
    case OpKind::Subtraction: return "subtraction";
    case OpKind::Addition: return "addition";
  }
  return "none";
}

OpKind parse_op_kind(std::string_view name) {
  if (name == "none") return OpKind::None;
  if (name == "catalysis") return OpKind::Catalysis;
  if (name == "subtraction") return OpKind::Subtraction;
  if (name == "addition") return OpKind::Addition;
  throw std::invalid_argument("unknown operation '" + std::string(name) + "'");
}

void NGOperation::validate() const {
  if (kind == OpKind::None) return;
  if (!(transmissivity > 0.0 && transmissivity <= 1.0)) {
    throw std::invalid_argument("beam-splitter transmissivity must lie in (0, 1]");
  }
}

OccupationMap::OccupationMap(Family family, double transmissivity)
    : family_(family), t_(transmissivity) {
  if (family != Family::Identity && !(t_ > 0.0 && t_ <= 1.0)) {
    throw std::invalid_argument("beam-splitter transmissivity must lie in (0, 1]");
  }
}

int OccupationMap::shift() const {
  switch (family_) {
    case Family::Subtraction: return -1;
    case Family::Addition: return 1;
    default: return 0;
  }
}

double OccupationMap::operator()(int m) const {
  if (m < 0) throw std::out_of_range("negative occupation");
  const double sqrt_t = std::sqrt(t_);
  const double attenuation = std::pow(sqrt_t, m);
  switch (family_) {
    case Family::Identity:
      return 1.0;
    case Family::ZeroCatalysis:
      return attenuation;
    case Family::OneCatalysis:
      return attenuation / sqrt_t * (t_ - (1.0 - t_) * m);
    case Family::Subtraction:
      if (m == 0) return 0.0;
      return std::sqrt((1.0 - t_) / t_) * std::sqrt(static_cast<double>(m)) * attenuation;
    case Family::Addition:
      return -std::sqrt(1.0 - t_) * std::sqrt(static_cast<double>(m + 1)) * attenuation;
  }
  return 0.0;
}

OccupationMap catalysis_zero_map(double t) { return {OccupationMap::Family::ZeroCatalysis, t}; }
OccupationMap catalysis_one_map(double t) { return {OccupationMap::Family::OneCatalysis, t}; }
OccupationMap subtraction_map(double t) { return {OccupationMap::Family::Subtraction, t}; }
OccupationMap addition_map(double t) { return {OccupationMap::Family::Addition, t}; }
OccupationMap identity_map() { return {OccupationMap::Family::Identity, 1.0}; }

OccupationMap leading_map(const NGOperation& op) {
  op.validate();
  switch (op.kind) {
    case OpKind::None: return identity_map();
    case OpKind::Catalysis: return catalysis_one_map(op.transmissivity);
    case OpKind::Subtraction: return subtraction_map(op.transmissivity);
    case OpKind::Addition: return addition_map(op.transmissivity);
  }
  return identity_map();
}

OccupationMap companion_map(const NGOperation& op, DetectionStrategy strategy) {
  op.validate();
  if (op.kind == OpKind::None || strategy == DetectionStrategy::Untouched) return identity_map();
  return catalysis_zero_map(op.transmissivity);
}

TripartiteAmplitudes apply_occupation_map(const OccupationMap& map,
                                          const TripartiteAmplitudes& state,
                                          MapArgument argument) {
  if (argument == MapArgument::PreLoss && map.shift() != 0) {
    throw std::invalid_argument(
        "a shifting map does not commute with loss; apply it before the channel instead");
  }
  TripartiteAmplitudes out(state.dims(), state.supermode_index());
  const int n_b = state.dims().n_b;
  for (const auto& x : state.entries()) {
    const int m = argument == MapArgument::PreLoss ? x.b + x.e : x.b;
    const int b = x.b + map.shift();
    if (b < 0 || b > n_b) continue;
    const double c = map(m);
    if (c == 0.0) continue;
    out.add(b, x.d, x.e, c * x.amp);
  }
  return out;
}

Eigen::MatrixXd bs_oracle(int n_ancilla_in, int n_ancilla_out, double transmissivity, int dim) {
  if (n_ancilla_in < 0 || n_ancilla_in > 1 || n_ancilla_out < 0 || n_ancilla_out > 1) {
    throw std::invalid_argument("ancilla occupations must be 0 or 1");
  }
  if (dim < 2 || dim > 64) throw std::invalid_argument("bs_oracle dim must lie in [2, 64]");
  if (!(transmissivity > 0.0 && transmissivity <= 1.0)) {
    throw std::invalid_argument("beam-splitter transmissivity must lie in (0, 1]");
  }

  const Eigen::MatrixXd a = ladder_matrix(dim);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  // ancilla (x) signal, index = n_anc * dim + m
  const Eigen::MatrixXd anc = Eigen::kroneckerProduct(a, id);
  const Eigen::MatrixXd sig = Eigen::kroneckerProduct(id, a);
  const double theta = std::acos(std::sqrt(transmissivity));
  const Eigen::MatrixXd generator =
      theta * (anc.transpose() * sig - anc * sig.transpose());
  // The generator conserves n_anc + m, so it is exponentiated one
  // total-occupation block at a time.
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(dim * dim, dim * dim);
  for (int total = 0; total <= 2 * (dim - 1); ++total) {
    std::vector<Eigen::Index> idx;
    for (int n = std::max(0, total - dim + 1); n <= std::min(total, dim - 1); ++n) {
      idx.push_back(static_cast<Eigen::Index>(n) * dim + (total - n));
    }
    const auto size = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd block(size, size);
    for (Eigen::Index i = 0; i < size; ++i)
      for (Eigen::Index j = 0; j < size; ++j) block(i, j) = generator(idx[i], idx[j]);
    const Eigen::MatrixXd e = block.exp();
    for (Eigen::Index i = 0; i < size; ++i)
      for (Eigen::Index j = 0; j < size; ++j) u(idx[i], idx[j]) = e(i, j);
  }
  if (!u.allFinite()) throw std::runtime_error("beam-splitter matrix exponential diverged");

  return u.block(static_cast<Eigen::Index>(n_ancilla_out) * dim,
                 static_cast<Eigen::Index>(n_ancilla_in) * dim, dim, dim);
}

}  // namespace ngsat
