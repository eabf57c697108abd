#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ngsat/pdc.hpp"

using namespace ngsat;

TEST_CASE("EPR ladder") {
  auto vac = epr_ladder(0.0, 5);
  CHECK(vac.q[0] == 1.0);
  for (int n = 1; n <= 5; ++n) CHECK(vac.q[n] == 0.0);

  auto l = epr_ladder(std::atanh(0.5), 3);
  CHECK(l.q[0] == doctest::Approx(0.86602540378443865).epsilon(1e-14));
  CHECK(l.q[1] == doctest::Approx(0.43301270189221932).epsilon(1e-14));

  for (double r : {0.1, 0.5, 1.0, 1.5}) {
    for (int n_max : {0, 3, 10, 30}) {
      auto q = epr_ladder(r, n_max).q;
      double sum = 0.0;
      for (double x : q) sum += x * x;
      const double bound = std::pow(std::tanh(r), 2 * (n_max + 1));
      CHECK(1.0 - sum <= bound + 4e-16);
      for (int n = 1; n <= n_max; ++n) CHECK(q[n] <= q[n - 1]);
    }
  }
  CHECK_THROWS(epr_ladder(-0.1, 3));
}

TEST_CASE("EPR state respects the truncation and the floor") {
  auto s = epr_state(0.5, Truncation{4, 6, 2});
  CHECK(s.entries().size() == 5);
  auto trimmed = epr_state(0.5, Truncation{}, 1, 1e-6);
  // tanh(0.5)^n < 1e-6 from n = 18
  CHECK(trimmed.entries().size() == 18);
}

TEST_CASE("squeezing in dB") {
  CHECK(squeezing_db(0.0) == 0.0);
  CHECK(squeezing_db(0.3454) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(squeezing_db(0.3454) == doctest::Approx(3.0001062809876636).epsilon(1e-13));
  for (double r : {0.01, 0.3, 1.2, 3.0}) CHECK(std::abs(squeezing_from_db(squeezing_db(r)) - r) <= 1e-12);
  CHECK(squeezing_from_db(3.0) == doctest::Approx(0.34538776394910685).epsilon(1e-14));
}

TEST_CASE("Schmidt decomposition") {
  SUBCASE("rank one") {
    Eigen::VectorXd a(3), b(4);
    a << 1, 2, 2;
    b << 0.5, 0.5, 0.5, 0.5;
    auto out = schmidt_decompose((a / 3.0) * b.transpose());
    CHECK(out.spectrum.lambdas[0] == doctest::Approx(1.0));
    for (std::size_t k = 1; k < out.spectrum.lambdas.size(); ++k) CHECK(out.spectrum.lambdas[k] <= 1e-14);
  }
  SUBCASE("diagonal") {
    Eigen::MatrixXd m = Eigen::Vector2d(0.8, 0.6).asDiagonal();
    auto out = schmidt_decompose(m);
    CHECK(out.spectrum.lambdas[0] == doctest::Approx(0.8));
    CHECK(out.spectrum.lambdas[1] == doctest::Approx(0.6));
    CHECK((out.basis.phi - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((out.basis.psi - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("double-Gaussian 64x64") {
    auto jsa = double_gaussian_jsa(64, 3.0, 1.0, 0.4);
    auto out = schmidt_decompose(jsa);
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(64, 64);
    for (int k = 0; k < out.spectrum.k_max(); ++k)
      rebuilt += out.scale * out.spectrum.lambdas[k] * out.basis.phi.row(k).transpose() * out.basis.psi.row(k);
    CHECK((rebuilt - jsa).norm() <= 1e-8);
    const auto n = out.basis.phi.rows();
    CHECK((out.basis.phi * out.basis.phi.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((out.basis.psi * out.basis.psi.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK_NOTHROW(out.spectrum.validate());
    CHECK(out.spectrum.lambdas[0] < 0.99);
  }
  CHECK_THROWS(schmidt_decompose(Eigen::MatrixXd::Zero(3, 3)));
}

TEST_CASE("spectrum presets") {
  auto flat = preset_spectrum("flat", 5, 1.0);
  for (double l : flat.lambdas) CHECK(l == doctest::Approx(0.44721359549995794));

  auto sd = preset_spectrum(SpectrumPreset::SingleDominant, 5, 1.0);
  CHECK(sd.lambdas[0] == doctest::Approx(0.99999799999799999).epsilon(1e-14));
  CHECK(sd.lambdas[4] == 1e-3);

  auto dec = preset_spectrum("decaying", 5, 1.0);
  const double expected[5] = {0.72444807092472417, 0.50711364964730692, 0.35497955475311484,
                              0.24848568832718039, 0.17393998182902627};
  for (int k = 0; k < 5; ++k) CHECK(dec.lambdas[k] == doctest::Approx(expected[k]).epsilon(1e-14));

  for (auto p : {SpectrumPreset::SingleDominant, SpectrumPreset::Decaying, SpectrumPreset::Flat}) {
    for (int k_max : {1, 2, 5, 9}) {
      auto s = preset_spectrum(p, k_max, 1.0);
      double norm = 0.0;
      for (double l : s.lambdas) norm += l * l;
      CHECK(std::abs(norm - 1.0) <= 1e-12);
    }
    CHECK(parse_spectrum_preset(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_spectrum_preset("gaussian"), std::invalid_argument);
  CHECK_THROWS(preset_spectrum("flat", 0, 1.0));
}

TEST_CASE("leading squeezing sets the gain") {
  auto s = preset_spectrum("decaying", 4, 1.0).with_leading_squeezing(0.6);
  CHECK(s.squeezing(1) == doctest::Approx(0.6));
  CHECK(s.squeezing(2) == doctest::Approx(0.42));
  SupermodeSpectrum bad{{0.6, 0.8}, 1.0};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("JSA CSV reader") {
  const auto path = std::filesystem::temp_directory_path() / "ngsat_jsa_test.csv";
  {
    std::ofstream out(path);
    out << "# signal rows\n0.5,0.1,0\n0.1,0.5,0.25\n";
  }
  auto m = read_jsa_csv(path);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 0.25);
  {
    std::ofstream out(path);
    out << "1,2\n3\n";
  }
  CHECK_THROWS(read_jsa_csv(path));
  {
    std::ofstream out(path);
    out << "1,x\n";
  }
  CHECK_THROWS(read_jsa_csv(path));
  std::filesystem::remove(path);
  CHECK_THROWS(read_jsa_csv(path));
}
