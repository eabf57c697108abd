#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "ngsat/channel.hpp"
#include "ngsat/fock.hpp"
#include "ngsat/metrics.hpp"
#include "ngsat/nongauss.hpp"
#include "ngsat/pdc.hpp"

using namespace ngsat;

namespace {

DensityMatrix bell_rho() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return DensityMatrix(2, 2, m);
}

TripartiteAmplitudes random_line_state(std::mt19937_64& rng, Truncation dims, int offset) {
  std::normal_distribution<double> g;
  TripartiteAmplitudes s(dims);
  for (int d = 0; d <= dims.n_d; ++d)
    for (int e = 0; e <= dims.n_e; ++e) {
      const int b = d - e + offset;
      if (b >= 0 && b <= dims.n_b) s.add(b, d, e, g(rng));
    }
  return s;
}

double full_negativity(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) < -kTolEig) s -= es.eigenvalues()(i);
  return s;
}

}  // namespace

TEST_CASE("trace out: pure slice gives the outer product") {
  Truncation t{2, 2, 2};
  TripartiteAmplitudes s(t);
  s.add(0, 0, 0, 0.6);
  s.add(1, 1, 0, 0.8);
  auto rho = trace_out_environment(s);
  CHECK(rho(0, 0, 0, 0) == doctest::Approx(0.36));
  CHECK(rho(0, 0, 1, 1) == doctest::Approx(0.48));
  CHECK(rho(1, 1, 1, 1) == doctest::Approx(0.64));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho.elements());
  CHECK(es.eigenvalues()(es.eigenvalues().size() - 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("trace out: two orthogonal environment slices give rank 2") {
  Truncation t{2, 2, 2};
  TripartiteAmplitudes s(t);
  s.add(0, 0, 0, std::sqrt(0.5));
  s.add(1, 1, 1, std::sqrt(0.5));
  auto rho = trace_out_environment(s);
  CHECK(rho.trace() == doctest::Approx(1.0));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(rho.elements());
  CHECK(lu.rank() == 2);
}

TEST_CASE("trace out: lossy EPR stays normalized") {
  Truncation t;
  auto s = apply_pure_loss(epr_state(0.5, t), 0.7);
  CHECK(std::abs(trace_out_environment(s).trace() - 1.0) <= 1e-12);
}

TEST_CASE("trace out: weight p state has trace p") {
  Truncation t{12, 12, 12};
  auto s = apply_pure_loss(apply_occupation_map(catalysis_one_map(0.6), epr_state(0.4, t)), 0.5);
  CHECK(std::abs(trace_out_environment(s).trace() - s.squared_norm()) <= 1e-12);
}

TEST_CASE("partial transpose") {
  SUBCASE("diagonal matrix unchanged") {
    Eigen::MatrixXd m = Eigen::VectorXd::LinSpaced(6, 0.1, 0.6).asDiagonal();
    DensityMatrix rho(2, 3, m);
    CHECK(partial_transpose_d(rho).elements() == m);
  }
  SUBCASE("Bell state spectrum") {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(partial_transpose_d(bell_rho()).elements());
    CHECK(es.eigenvalues()(0) == doctest::Approx(-0.5));
    for (int i = 1; i < 4; ++i) CHECK(es.eigenvalues()(i) == doctest::Approx(0.5));
  }
  SUBCASE("involution, trace, B vs D") {
    std::mt19937_64 rng(7);
    Truncation t{6, 5, 6};
    for (int trial = 0; trial < 5; ++trial) {
      auto rho = trace_out_environment(random_line_state(rng, t, trial - 2)).normalized();
      auto pt = partial_transpose_d(rho);
      CHECK(partial_transpose_d(pt).elements() == rho.elements());
      CHECK(pt.trace() == rho.trace());
      CHECK(std::abs(negative_eigenvalue_sum(pt) -
                     negative_eigenvalue_sum(partial_transpose_b(rho))) <= 1e-10);
    }
  }
}

TEST_CASE("negative eigenvalue sum") {
  CHECK(negative_eigenvalue_sum(bell_rho()) == 0.0);
  CHECK(negative_eigenvalue_sum(partial_transpose_d(bell_rho())) == doctest::Approx(0.5));

  Truncation t;
  auto rho = trace_out_environment(epr_state(0.5, t));
  CHECK(std::abs(negative_eigenvalue_sum(partial_transpose_d(rho)) - (std::exp(1.0) - 1.0) / 2.0) <= 1e-4);
}

TEST_CASE("blockwise eigensolve matches a full eigensolve") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(30, 30);
  // three scattered blocks
  const int label[30] = {0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2,
                         0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2};
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j <= i; ++j)
      if (label[i] == label[j]) m(i, j) = m(j, i) = g(rng);
  DensityMatrix rho(5, 6, m);
  CHECK(negative_eigenvalue_sum(rho) == doctest::Approx(full_negativity(m)).epsilon(1e-12));
}

TEST_CASE("line-state negativity matches the dense route") {
  std::mt19937_64 rng(3);
  Truncation t{7, 6, 5};
  for (int offset = -3; offset <= 3; ++offset) {
    auto s = random_line_state(rng, t, offset);
    const double dense = negative_eigenvalue_sum(partial_transpose_d(trace_out_environment(s).normalized()));
    CHECK(line_state_negativity(s) == doctest::Approx(dense).epsilon(1e-10));
  }
  TripartiteAmplitudes off(t);
  off.add(0, 0, 0, 1.0);
  off.add(1, 0, 0, 1.0);
  CHECK_THROWS_AS(line_state_negativity(off), std::invalid_argument);
}

TEST_CASE("pipeline states are positive semidefinite") {
  Truncation t{14, 14, 14};
  for (double eta : {0.2, 0.7}) {
    for (auto map : {catalysis_one_map(0.4), subtraction_map(0.4), identity_map()}) {
      auto s = apply_pure_loss(apply_occupation_map(map, epr_state(0.6, t)), eta);
      CHECK(trace_out_environment(s).normalized().min_eigenvalue() >= -kTolPsd);
    }
  }
}

TEST_CASE("ladder matrix") {
  auto a2 = ladder_matrix(2);
  CHECK(a2(0, 1) == 1.0);
  CHECK(a2(0, 0) == 0.0);
  CHECK(a2(1, 0) == 0.0);
  CHECK(a2(1, 1) == 0.0);
  CHECK(ladder_matrix(3)(1, 2) == doctest::Approx(std::sqrt(2.0)));
  auto a = ladder_matrix(6);
  Eigen::VectorXd n = (a.transpose() * a).diagonal();
  for (int i = 0; i < 6; ++i) CHECK(n(i) == doctest::Approx(i));
}

TEST_CASE("amplitudes: bounds and tail mass") {
  Truncation t{3, 3, 3};
  TripartiteAmplitudes s(t);
  CHECK_THROWS_AS(s.add(4, 0, 0, 1.0), std::out_of_range);
  s.add(3, 3, 0, 0.5);
  s.add(0, 0, 0, 0.5);
  CHECK(s.tail_mass() == doctest::Approx(0.5));
  CHECK(s.on_single_line());
  CHECK_THROWS(Truncation{-1, 3, 3}.validate());
}
