#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ngsat {

template <class Profile>
double rytov_variance(const ChannelParams& params, Profile&& cn2) {
  params.validate();
  const double k = 2.0 * std::numbers::pi / params.wavelength;
  const double h0 = params.ground_altitude;
  const double top = h0 + params.distance;
  auto integrand = [&](double h) { return cn2(h) * std::pow(h - h0, 5.0 / 6.0); };

  // Breakpoints at the profile's length scales keep each panel smooth.
  constexpr std::array<double, 5> kBreaks = {300.0, 3000.0, 12000.0, 40000.0, 1.0e5};
  double integral = 0.0;
  double lo = h0;
  auto panel = [&](double a, double b) {
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, a, b, 20, 1e-12, &error);
    if (!std::isfinite(value) || error > 1e-7 * std::abs(value) + 1e-300) {
      throw std::runtime_error("Rytov-variance quadrature did not converge");
    }
    integral += value;
  };
  for (double brk : kBreaks) {
    if (h0 + brk >= top) break;
    panel(lo, h0 + brk);
    lo = h0 + brk;
  }
  panel(lo, top);

  const double sec = 1.0 / std::cos(params.zenith);
  return 2.25 * std::pow(k, 7.0 / 6.0) * std::pow(sec, 11.0 / 6.0) * integral;
}

}  // namespace ngsat
