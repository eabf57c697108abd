#include "ngsat/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ngsat::special {

namespace {

constexpr double kSeriesLimit = 20.0;
constexpr int kMaxIter = 500;

// e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k
double hankel_scaled(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < kMaxIter; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_i0_scaled(double x) {
  if (!(x >= 0.0)) throw std::domain_error("bessel_i0_scaled needs x >= 0");
  if (x > kSeriesLimit) return hankel_scaled(0.0, x);
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum * std::exp(-x);
}

double bessel_i1_scaled(double x) {
  if (!(x >= 0.0)) throw std::domain_error("bessel_i1_scaled needs x >= 0");
  if (x > kSeriesLimit) return hankel_scaled(1.0, x);
  const double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum * std::exp(-x);
}

double one_minus_bessel_i0_scaled(double x) {
  if (!(x >= 0.0)) throw std::domain_error("one_minus_bessel_i0_scaled needs x >= 0");
  if (x >= 0.5) return 1.0 - bessel_i0_scaled(x);
  // e^{-x} I0(x) = 1F1(1/2; 1; -2x) = sum_k (1/2)_k (-2x)^k / (k!)^2
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= (k - 0.5) * (-2.0 * x) / (static_cast<double>(k) * k);
    sum -= term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double lambert_w0(double x) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (x < branch) {
    if (x > branch - 1e-15) return -1.0;
    throw std::domain_error("lambert_w0 needs x >= -1/e");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  double w;
  if (x < -0.32) {
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = 0.5 * std::log1p(x) + 0.25 * x / (1.0 + x);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int i = 0; i < 100; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
  }
  return w;
}

double lambert_w0_of_exp(double log_x) {
  if (log_x < 1.0) return lambert_w0(std::exp(log_x));
  // w + ln w = log_x, Newton from the asymptotic guess
  double w = log_x - std::log(log_x) + std::log(log_x) / log_x;
  for (int i = 0; i < 100; ++i) {
    const double f = w + std::log(w) - log_x;
    const double step = f / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * w) break;
  }
  return w;
}

}  // namespace ngsat::special
