#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ngsat/channel.hpp"
#include "ngsat/metrics.hpp"
#include "ngsat/nongauss.hpp"
#include "ngsat/pdc.hpp"
#include "ngsat/pipeline.hpp"

#include <unsupported/Eigen/KroneckerProduct>

using namespace ngsat;

namespace {

double fock_eln(double r, double eta, int n) {
  return log_negativity(apply_pure_loss(epr_state(r, Truncation{n, n, n}), eta));
}

Eigen::VectorXd dense_amplitudes(const TripartiteAmplitudes& s) {
  const auto& t = s.dims();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(t.dim_b() * t.dim_d() * t.dim_e());
  for (const auto& x : s.entries()) v((x.b * t.dim_d() + x.d) * t.dim_e() + x.e) += x.amp;
  return v;
}

}  // namespace

TEST_CASE("log-negativity examples") {
  Eigen::MatrixXd product = Eigen::MatrixXd::Zero(4, 4);
  product(0, 0) = 1.0;
  CHECK(log_negativity(DensityMatrix(2, 2, product)) == 0.0);

  Eigen::MatrixXd bell = Eigen::MatrixXd::Zero(4, 4);
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  CHECK(log_negativity(DensityMatrix(2, 2, bell)) == doctest::Approx(1.0));

  for (double r : {0.1, 0.4, 0.8}) {
    const double dense = log_negativity(trace_out_environment(epr_state(r, Truncation{})));
    CHECK(std::abs(dense - 2.0 * r * std::numbers::log2e) <= 1e-4);
  }
}

TEST_CASE("Gaussian oracle") {
  for (double r : {0.0, 0.2, 0.9, 1.7}) CHECK(gaussian_eln_oracle(r, 1.0) == doctest::Approx(2.0 * r * std::numbers::log2e));
  CHECK(gaussian_eln_oracle(0.0, 0.4) == 0.0);
  CHECK(gaussian_eln_oracle(0.8, 0.0) == 0.0);
  // closed-form smallest symplectic eigenvalue of the transposed matrix
  for (double r : {0.3, 1.0}) {
    for (double eta : {0.1, 0.6}) {
      const double a = eta * std::cosh(2 * r) + 1 - eta, b = std::cosh(2 * r), c = std::sqrt(eta) * std::sinh(2 * r);
      const double delta = a * a + b * b + 2 * c * c;
      const double det = (a * b - c * c) * (a * b - c * c);
      const double nu = std::sqrt((delta - std::sqrt(delta * delta - 4 * det)) / 2);
      CHECK(gaussian_eln_oracle(r, eta) == doctest::Approx(std::max(0.0, -std::log2(nu))).epsilon(1e-12));
    }
  }
  CHECK_THROWS(gaussian_eln_oracle(-0.1, 0.5));
  CHECK_THROWS(gaussian_eln_oracle(0.1, 1.5));
}

TEST_CASE("Fock baseline matches the Gaussian oracle") {
  for (double r = 0.05; r <= 0.8001; r += 0.15) {
    for (double eta : {0.05, 0.2, 0.5, 0.8, 1.0}) {
      CAPTURE(r);
      CAPTURE(eta);
      CHECK(std::abs(fock_eln(r, eta, 30) - gaussian_eln_oracle(r, eta)) <= 1e-3);
    }
  }
}

TEST_CASE("baseline log-negativity grows with squeezing") {
  for (double eta : {0.1, 0.7, 1.0}) {
    double prev = -1.0;
    for (double r = 0.0; r <= 1.0; r += 0.05) {
      const double v = fock_eln(r, eta, 30);
      CHECK(v > prev + 1e-10);
      prev = v;
    }
  }
}

TEST_CASE("truncation gives a lower bound") {
  for (double r : {0.3, 0.9, 1.4}) {
    for (double eta : {0.3, 1.0}) {
      for (int n : {5, 10, 15, 20}) CHECK(fock_eln(r, eta, n) <= fock_eln(r, eta, n + 5) + 1e-9);
    }
  }
}

TEST_CASE("dense and line routes agree") {
  Truncation t{20, 20, 20};
  auto s = apply_pure_loss(apply_occupation_map(catalysis_one_map(0.4), epr_state(0.7, t)), 0.6);
  CHECK(log_negativity(s) == doctest::Approx(log_negativity(trace_out_environment(s).normalized())).epsilon(1e-10));
}

TEST_CASE("total gain") {
  std::vector<double> a{0.5, 0.1}, b{0.5, 0.1};
  auto same = total_gain(a, b, 0.4);
  CHECK(same.gain == 0.0);
  CHECK(same.rate == 0.0);

  std::vector<double> worse{0.3, 0.1};
  CHECK(total_gain(worse, b, 0.9).gain == 0.0);

  std::vector<double> better{0.7, 0.05};
  auto g = total_gain(better, b, 0.5);
  CHECK(g.gain == doctest::Approx(0.15));
  CHECK(g.rate == doctest::Approx(0.075));

  CHECK_THROWS(total_gain(std::vector<double>{0.1}, b, 0.5));
  CHECK_THROWS(total_gain(a, b, 1.5));

  Truncation t{10, 10, 10};
  std::vector<DensityMatrix> rhos{trace_out_environment(epr_state(0.3, t))};
  CHECK(total_gain(rhos, rhos, 1.0).gain == 0.0);
  std::vector<DensityMatrix> none;
  CHECK_THROWS(total_gain(rhos, none, 1.0));
}

TEST_CASE("single-supermode catalysis helps at small squeezing") {
  ScenarioConfig c;
  c.operation = {OpKind::Catalysis, 0.5};
  c.spectrum = SupermodeSpectrum{{1.0}, 0.05};
  auto best = optimize_T(c, 1.0, Objective::Gain);
  CHECK(best.value > 0.0);
  CHECK(best.record.gain > 0.0);
}

TEST_CASE("success probability is the squared norm of the joint amplitude") {
  const double t = 0.35, eta = 0.6;
  ScenarioConfig c;
  c.operation = {OpKind::Catalysis, t};
  c.spectrum = SupermodeSpectrum{{0.8, 0.6}, 0.9};
  c.truncation = Truncation{14, 14, 14};
  ScenarioEvaluator ev(c, eta);
  const double reported = ev.at(t).probability;

  auto s1 = apply_pure_loss(apply_occupation_map(catalysis_one_map(t), epr_state(0.72, c.truncation)), eta);
  auto s2 = apply_pure_loss(apply_occupation_map(catalysis_zero_map(t), epr_state(0.54, c.truncation)), eta);
  Eigen::VectorXd joint = Eigen::kroneckerProduct(dense_amplitudes(s1), dense_amplitudes(s2));
  CHECK(std::abs(reported - joint.squaredNorm()) <= 1e-12);
}
