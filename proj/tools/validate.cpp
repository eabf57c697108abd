#include <algorithm>
#include <cmath>
#include <numbers>

#include "cli.hpp"
#include "ngsat/channel.hpp"
#include "ngsat/metrics.hpp"
#include "ngsat/nongauss.hpp"
#include "ngsat/pdc.hpp"

namespace ngsat::cli {

namespace {

double oracle_deviation(int n_in, int n_out, const OccupationMap& map, int dim) {
  const Eigen::MatrixXd u = bs_oracle(n_in, n_out, map.transmissivity(), dim);
  double worst = 0.0;
  for (int m = 0; m <= dim - 10; ++m) {
    for (int row = 0; row < dim; ++row) {
      const double expected = row == m + map.shift() ? map(m) : 0.0;
      worst = std::max(worst, std::abs(u(row, m) - expected));
    }
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> validation_suite(double scale) {
  std::vector<CheckResult> out;

  struct Family {
    const char* name;
    int n_in, n_out;
    OccupationMap (*make)(double);
  };
  const Family families[] = {{"zero-photon catalysis", 0, 0, catalysis_zero_map},
                             {"single-photon catalysis", 1, 1, catalysis_one_map},
                             {"subtraction", 0, 1, subtraction_map},
                             {"addition", 1, 0, addition_map}};
  for (const auto& f : families) {
    double worst = 0.0;
    for (int i = 1; i <= 9; ++i) worst = std::max(worst, oracle_deviation(f.n_in, f.n_out, f.make(0.1 * i), 24));
    out.push_back({std::string("beam splitter: ") + f.name, worst, 1e-9 * scale});
  }

  double worst = 0.0;
  for (double r : {0.1, 0.3, 0.5, 0.8}) {
    for (double eta : {0.05, 0.2, 0.5, 0.8, 1.0}) {
      const auto state = apply_pure_loss(epr_state(r, Truncation{}), eta);
      worst = std::max(worst, std::abs(log_negativity(state) - gaussian_eln_oracle(r, eta)));
    }
  }
  out.push_back({"gaussian log-negativity", worst, 1e-3 * scale});

  worst = 0.0;
  for (double w : {0.5, 1.0, 2.0}) {
    worst = std::max(worst, std::abs(transmissivity(0, 0, w, w, 0.0, 1.0) - (1.0 - std::exp(-2.0 / (w * w)))));
  }
  out.push_back({"channel: circular beam", worst, 1e-12 * scale});

  ChannelParams p;
  const double c = 1e-15;
  const double analytic = 2.25 * std::pow(2.0 * std::numbers::pi / p.wavelength, 7.0 / 6.0) * c *
                          std::pow(p.distance, 11.0 / 6.0) * 6.0 / 11.0;
  const double rytov = rytov_variance(p, [c](double) { return c; });
  out.push_back({"channel: constant-profile Rytov", std::abs(rytov / analytic - 1.0), 1e-8 * scale});

  out.push_back({"channel: scintillation at zero", std::abs(scintillation_index(0.0)), 0.0});

  worst = 0.0;
  const auto epr = epr_state(0.8, Truncation{});
  for (double eta : {0.0, 0.3, 0.7, 1.0}) {
    worst = std::max(worst, std::abs(apply_pure_loss(epr, eta).squared_norm() - epr.squared_norm()));
  }
  out.push_back({"channel: pure-loss norm", worst, 1e-12 * scale});

  return out;
}

}  // namespace ngsat::cli
