#include "ngsat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ngsat {

double log_negativity(const DensityMatrix& rho) {
  return std::log2(1.0 + 2.0 * negative_eigenvalue_sum(partial_transpose_d(rho)));
}

double log_negativity(const TripartiteAmplitudes& state) {
  return std::log2(1.0 + 2.0 * line_state_negativity(state));
}

double gaussian_eln_oracle(double r, double eta) {
  if (!(r >= 0.0)) throw std::invalid_argument("squeezing parameter must be >= 0");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("transmissivity must lie in [0, 1]");

  // Ordering (x_B, p_B, x_D, p_D).
  const double ch = std::cosh(2.0 * r);
  const double sh = std::sinh(2.0 * r);
  Eigen::Matrix4d v = Eigen::Matrix4d::Zero();
  v(0, 0) = v(1, 1) = eta * ch + (1.0 - eta);
  v(2, 2) = v(3, 3) = ch;
  v(0, 2) = v(2, 0) = std::sqrt(eta) * sh;
  v(1, 3) = v(3, 1) = -std::sqrt(eta) * sh;

  // Partial transpose on D flips p_D.
  const Eigen::Matrix4d flip = Eigen::Vector4d(1.0, 1.0, 1.0, -1.0).asDiagonal();
  const Eigen::Matrix4d vpt = flip * v * flip;

  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = omega(2, 3) = 1.0;
  omega(1, 0) = omega(3, 2) = -1.0;

  // Symplectic eigenvalues are the moduli of the eigenvalues of i Omega V.
  const Eigen::Matrix4cd m = std::complex<double>(0.0, 1.0) * (omega * vpt).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(m, false);
  double nu = std::abs(solver.eigenvalues()(0));
  for (int i = 1; i < 4; ++i) nu = std::min(nu, std::abs(solver.eigenvalues()(i)));
  // A product state has nu = 1 up to eigensolver rounding.
  if (nu >= 1.0 - 1e-14) return 0.0;
  return -std::log2(nu);
}

GainRecord total_gain(std::span<const double> eln, std::span<const double> baseline_eln,
                      double probability) {
  if (eln.size() != baseline_eln.size() || eln.empty()) {
    throw std::invalid_argument("non-Gaussian and baseline supermode counts differ");
  }
  if (!(probability >= 0.0 && probability <= 1.0 + 1e-12)) {
    throw std::invalid_argument("success probability must lie in [0, 1]");
  }
  GainRecord out;
  out.eln.assign(eln.begin(), eln.end());
  out.baseline_eln.assign(baseline_eln.begin(), baseline_eln.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < eln.size(); ++k) sum += eln[k] - baseline_eln[k];
  out.gain = std::max(sum, 0.0);
  out.probability = std::min(probability, 1.0);
  out.rate = out.probability * out.gain;
  return out;
}

GainRecord total_gain(std::span<const DensityMatrix> nongaussian,
                      std::span<const DensityMatrix> baseline, double probability) {
  if (nongaussian.size() != baseline.size()) {
    throw std::invalid_argument("non-Gaussian and baseline supermode counts differ");
  }
  std::vector<double> eln, base;
  for (const auto& rho : nongaussian) eln.push_back(log_negativity(rho));
  for (const auto& rho : baseline) base.push_back(log_negativity(rho));
  return total_gain(eln, base, probability);
}

}  // namespace ngsat
