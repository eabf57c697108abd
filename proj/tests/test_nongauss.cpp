#include "doctest.h"

#include <cmath>

#include "ngsat/channel.hpp"
#include "ngsat/fock.hpp"
#include "ngsat/nongauss.hpp"
#include "ngsat/pdc.hpp"

using namespace ngsat;

namespace {

double max_oracle_deviation(OpKind kind, double t, int dim) {
  int n_in = 0, n_out = 0;
  OccupationMap map = catalysis_zero_map(t);
  switch (kind) {
    case OpKind::Catalysis: n_in = n_out = 1; map = catalysis_one_map(t); break;
    case OpKind::Subtraction: n_out = 1; map = subtraction_map(t); break;
    case OpKind::Addition: n_in = 1; map = addition_map(t); break;
    case OpKind::None: break;
  }
  const Eigen::MatrixXd u = bs_oracle(n_in, n_out, t, dim);
  double worst = 0.0;
  for (int m = 0; m <= dim - 10; ++m) {
    const int out = m + map.shift();
    for (int row = 0; row < dim; ++row) {
      const double expected = row == out ? map(m) : 0.0;
      worst = std::max(worst, std::abs(u(row, m) - expected));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("zero-photon catalysis") {
  for (int m = 0; m < 10; ++m) CHECK(catalysis_zero_map(1.0)(m) == 1.0);
  CHECK(catalysis_zero_map(0.25)(2) == doctest::Approx(0.25));

  const double r = 0.4, t = 0.6, th = std::tanh(r);
  auto s = apply_occupation_map(catalysis_zero_map(t), epr_state(r, Truncation{}));
  CHECK(s.squared_norm() == doctest::Approx((1 - th * th) / (1 - t * th * th)).epsilon(1e-12));
  CHECK(s.squared_norm() == doctest::Approx(0.93677956739529839).epsilon(1e-12));
}

TEST_CASE("single-photon catalysis") {
  for (int m = 0; m < 10; ++m) CHECK(catalysis_one_map(1.0)(m) == doctest::Approx(1.0));
  CHECK(catalysis_one_map(0.5)(1) == doctest::Approx(0.0));
  CHECK(catalysis_one_map(0.7)(2) == doctest::Approx(0.083666002653407555).epsilon(1e-14));
  const Eigen::MatrixXd u = bs_oracle(1, 1, 0.7, 24);
  CHECK(u(2, 2) == doctest::Approx(0.083666002653407555).epsilon(1e-9));
}

TEST_CASE("single-photon catalysis factors through zero-photon catalysis") {
  for (int i = 1; i <= 9; ++i) {
    const double t = 0.1 * i;
    for (int m = 0; m <= 30; ++m) {
      const double rhs = catalysis_zero_map(t)(m) * (std::sqrt(t) - (1 - t) * m / std::sqrt(t));
      CHECK(std::abs(catalysis_one_map(t)(m) - rhs) <= 1e-14 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("subtraction and addition prefactors") {
  CHECK(subtraction_map(0.5)(0) == 0.0);
  CHECK(subtraction_map(0.5)(1) == doctest::Approx(std::sqrt(0.5)));
  CHECK(subtraction_map(0.5).shift() == -1);
  for (int m = 0; m < 8; ++m) {
    CHECK(subtraction_map(1.0)(m) == 0.0);
    CHECK(addition_map(1.0)(m) == 0.0);
  }
  CHECK(addition_map(0.5)(1) == doctest::Approx(-std::sqrt(0.5)));
  CHECK(addition_map(0.5).shift() == 1);

  auto vac = apply_occupation_map(addition_map(0.3), epr_state(0.0, Truncation{4, 4, 4}));
  CHECK(vac.squared_norm() == doctest::Approx(0.7));
  CHECK(vac.amplitude(1, 0, 0) == doctest::Approx(-std::sqrt(0.7)));
}

TEST_CASE("operation on an EPR state") {
  Truncation t{10, 10, 10};
  auto epr = epr_state(std::atanh(0.5), t);
  auto none = apply_occupation_map(leading_map({OpKind::None, 0.3}), epr);
  auto cat1 = apply_occupation_map(catalysis_one_map(1.0), epr);
  for (int n = 0; n <= 10; ++n) {
    CHECK(none.amplitude(n, n, 0) == doctest::Approx(epr.amplitude(n, n, 0)));
    CHECK(cat1.amplitude(n, n, 0) == doctest::Approx(epr.amplitude(n, n, 0)));
  }
  auto msc = apply_occupation_map(catalysis_one_map(0.5), epr);
  CHECK(msc.amplitude(0, 0, 0) == doctest::Approx(0.61237243569579452).epsilon(1e-14));
  CHECK(std::abs(msc.amplitude(1, 1, 0)) <= 1e-15);
}

TEST_CASE("closed forms agree with the beam-splitter oracle") {
  for (auto kind : {OpKind::None, OpKind::Catalysis, OpKind::Subtraction, OpKind::Addition}) {
    for (int i = 1; i <= 9; ++i) {
      CAPTURE(to_string(kind));
      CAPTURE(i);
      CHECK(max_oracle_deviation(kind, 0.1 * i, 24) <= 1e-9);
    }
  }
  // small dimensions: the catalysis diagonal is still reproduced well below the edge
  for (int dim = 4; dim <= 12; ++dim) {
    const Eigen::MatrixXd u = bs_oracle(1, 1, 0.6, dim);
    CHECK(std::abs(u(0, 0) - catalysis_one_map(0.6)(0)) <= 1e-10);
  }
}

TEST_CASE("operator ordering") {
  Truncation t{16, 16, 16};
  auto epr = epr_state(0.5, t);
  auto dense = [](const TripartiteAmplitudes& s) { return trace_out_environment(s).elements(); };

  auto before = apply_pure_loss(apply_occupation_map(subtraction_map(0.6), epr), 0.5);
  auto after = apply_occupation_map(subtraction_map(0.6), apply_pure_loss(epr, 0.5));
  CHECK((dense(before) - dense(after)).cwiseAbs().maxCoeff() > 1e-3);

  auto before1 = apply_pure_loss(apply_occupation_map(subtraction_map(0.6), epr), 1.0);
  auto after1 = apply_occupation_map(subtraction_map(0.6), apply_pure_loss(epr, 1.0));
  CHECK((dense(before1) - dense(after1)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("heralding probabilities lie in [0, 1]") {
  Truncation t{20, 20, 20};
  t = t.with_addition_headroom();
  for (double r : {0.0, 0.2, 0.6, 1.0}) {
    auto epr = epr_state(r, t);
    auto lossy = apply_pure_loss(epr, 0.4);
    for (int i = 1; i <= 9; ++i) {
      const double tt = 0.1 * i;
      for (auto map : {catalysis_zero_map(tt), catalysis_one_map(tt), subtraction_map(tt), addition_map(tt)}) {
        for (const auto* s : {&epr, &lossy}) {
          const double p = apply_occupation_map(map, *s).squared_norm();
          CHECK(p >= 0.0);
          CHECK(p <= 1.0 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("pre-loss argument") {
  Truncation t{8, 8, 8};
  auto lossy = apply_pure_loss(epr_state(0.5, t), 0.5);
  auto pre = apply_occupation_map(catalysis_zero_map(0.5), lossy, MapArgument::PreLoss);
  for (const auto& x : lossy.entries())
    CHECK(pre.amplitude(x.b, x.d, x.e) == doctest::Approx(x.amp * std::pow(std::sqrt(0.5), x.b + x.e)));
  CHECK_THROWS(apply_occupation_map(subtraction_map(0.5), lossy, MapArgument::PreLoss));
}

TEST_CASE("operation names and validation") {
  CHECK(parse_op_kind("catalysis") == OpKind::Catalysis);
  CHECK(parse_op_kind("addition") == OpKind::Addition);
  CHECK(parse_op_kind(to_string(OpKind::Subtraction)) == OpKind::Subtraction);
  CHECK_THROWS(parse_op_kind("teleport"));
  CHECK_THROWS(NGOperation{OpKind::Catalysis, 0.0}.validate());
  CHECK_THROWS(NGOperation{OpKind::Catalysis, 1.5}.validate());
  CHECK(companion_map({OpKind::Catalysis, 0.3}, DetectionStrategy::Untouched)(4) == 1.0);
  CHECK(companion_map({OpKind::Catalysis, 0.25}, DetectionStrategy::ZeroPhotonCatalysis)(2) ==
        doctest::Approx(0.25));
}
