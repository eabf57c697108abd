#include "ngsat/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ngsat/special.hpp"

namespace ngsat {

namespace {

// 2(1 - e^{-x/2}) - (1 - e^{-x} I0(x)), summed as one series for small x
// where both terms are ~x and cancel.
double capture_excess(double x) {
  if (x >= 0.5) return -2.0 * std::expm1(-0.5 * x) - special::one_minus_bessel_i0_scaled(x);
  double exp_term = 1.0;     // (-x/2)^k / k!
  double bessel_term = 1.0;  // (1/2)_k (-2x)^k / (k!)^2
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    exp_term *= -0.5 * x / k;
    bessel_term *= (k - 0.5) * (-2.0 * x) / (static_cast<double>(k) * k);
    const double c = -2.0 * exp_term + bessel_term;
    sum += c;
    if (std::abs(c) < 1e-18 * std::abs(sum) && k > 2) break;
  }
  return sum;
}

struct Shape {
  double lambda;  // shaping exponent
  double scale;   // R
};

// Shaping and scaling functions at argument xi, passed as x = r0^2 xi^2 > 0.
Shape shape_functions(double x) {
  const double den = special::one_minus_bessel_i0_scaled(x);
  const double log_ratio = std::log1p(capture_excess(x) / den);
  const double lambda = 2.0 * x * special::bessel_i1_scaled(x) / den / log_ratio;
  const double scale = std::exp(-std::log(log_ratio) / lambda);
  return {lambda, scale};
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("channel parameter ") + name + " must be positive");
  }
}

void write_number(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void ChannelParams::validate() const {
  check_positive(beam_waist, "beam_waist");
  check_positive(aperture_radius, "aperture_radius");
  check_positive(wavelength, "wavelength");
  check_positive(distance, "distance");
  check_positive(cn2_ground, "cn2_ground");
  check_positive(wind_speed, "wind_speed");
  if (!(zenith >= 0.0 && zenith < std::numbers::pi / 2)) {
    throw std::invalid_argument("channel parameter zenith must lie in [0, pi/2)");
  }
  if (!(ground_altitude >= 0.0)) {
    throw std::invalid_argument("channel parameter ground_altitude must be >= 0");
  }
}

double cn2_profile(double h, const ChannelParams& params) {
  if (!(h >= 0.0)) throw std::invalid_argument("altitude must be >= 0");
  const double v = params.wind_speed / 27.0;
  return 0.00594 * v * v * std::pow(h * 1e-5, 10) * std::exp(-h / 1000.0) +
         2.7e-16 * std::exp(-h / 1500.0) + params.cn2_ground * std::exp(-h / 100.0);
}

double rytov_variance(const ChannelParams& params) {
  return rytov_variance(params, [&](double h) { return cn2_profile(h, params); });
}

double scintillation_index(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("Rytov variance must be >= 0");
  const double p = std::pow(s, 6.0 / 5.0);  // sigma_R^{12/5}
  return std::expm1(0.49 * s / std::pow(1.0 + 1.11 * p, 7.0 / 6.0) +
                    0.51 * s / std::pow(1.0 + 0.69 * p, 5.0 / 6.0));
}

TurbulenceMoments turbulence_moments(const ChannelParams& params) {
  const double sigma_r2 = rytov_variance(params);
  auto m = beam_moments(params, scintillation_index(sigma_r2));
  m.rytov_variance = sigma_r2;
  return m;
}

TurbulenceMoments beam_moments(const ChannelParams& params, double scintillation) {
  params.validate();
  if (!(scintillation >= 0.0)) throw std::invalid_argument("scintillation index must be >= 0");
  TurbulenceMoments m;
  m.scintillation_index = scintillation;
  m.omega = std::numbers::pi * params.beam_waist * params.beam_waist /
            (params.distance * params.wavelength);

  const double s = m.scintillation_index * std::pow(m.omega, 5.0 / 6.0);
  const double growth = 1.0 + 2.96 * s;
  m.mean_theta = std::log(growth * growth /
                          (m.omega * m.omega * std::sqrt(growth * growth + 1.2 * s)));
  m.var_theta = std::log1p(1.2 * s / (growth * growth));
  m.cov_theta = std::log1p(-0.8 * s / (growth * growth));
  m.var_xy = 0.33 * params.beam_waist * params.beam_waist * m.scintillation_index *
             std::pow(m.omega, -7.0 / 6.0);
  return m;
}

double transmissivity(double x, double y, double w1, double w2, double phi, double r0) {
  if (!(w1 > 0.0 && w2 > 0.0) || !std::isfinite(w1) || !std::isfinite(w2)) {
    throw std::invalid_argument("beam semi-axes must be positive");
  }
  if (!(r0 > 0.0)) throw std::invalid_argument("aperture radius must be positive");

  const double r2 = r0 * r0;
  const double a = r2 / (w1 * w1);
  const double c = r2 / (w2 * w2);

  // Maximal transmissivity of the centred ellipse.
  double eta0 = 1.0 - special::bessel_i0_scaled(std::abs(a - c)) * std::exp(-2.0 * std::min(a, c));
  const double inv_diff = 1.0 / w1 - 1.0 / w2;
  if (inv_diff != 0.0) {
    const double xd = r2 * inv_diff * inv_diff;
    const Shape sh = shape_functions(xd);
    const double ratio = (w1 + w2) / std::abs(w1 - w2);
    eta0 -= -2.0 * std::expm1(-0.5 * xd) * std::exp(-std::pow(ratio / sh.scale, sh.lambda));
  }

  if (!(eta0 > -1e-9 && eta0 < 1.0 + 1e-9)) {
    throw std::domain_error("elliptic-beam transmissivity left [0, 1]: " + std::to_string(eta0));
  }
  eta0 = std::clamp(eta0, 0.0, 1.0);
  const double rho = std::hypot(x, y);
  if (rho == 0.0) return eta0;

  // r0^2 xi^2 with xi = 2 / W_eff equals the Lambert-W value itself.
  const double phi0 = std::atan2(y, x);
  const double cos2 = std::pow(std::cos(phi - phi0), 2);
  const double sin2 = 1.0 - cos2;
  const double log_arg = std::log(4.0 * r2 / (w1 * w2)) + a * (1.0 + 2.0 * cos2) + c * (1.0 + 2.0 * sin2);
  const double xe = special::lambert_w0_of_exp(log_arg);
  const Shape sh = shape_functions(xe);
  return eta0 * std::exp(-std::pow(rho / r0 / sh.scale, sh.lambda));
}

Rng make_substream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

BeamSample sample_beam(const TurbulenceMoments& moments, const ChannelParams& params, Rng& rng) {
  if (!(moments.var_xy >= 0.0) || !(moments.var_theta >= 0.0)) {
    throw std::invalid_argument("turbulence variances must be >= 0");
  }
  // Cholesky factor of [[v, c], [c, v]]; hairline indefiniteness is projected away.
  const double v = moments.var_theta;
  const double c = moments.cov_theta;
  double l11 = std::sqrt(v);
  double l21 = l11 > 0.0 ? c / l11 : 0.0;
  double schur = v - l21 * l21;
  if (schur < 0.0) {
    if (schur < -1e-12) throw std::domain_error("theta covariance is not positive semidefinite");
    schur = 0.0;
  }
  const double l22 = std::sqrt(schur);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
  const double sxy = std::sqrt(moments.var_xy);

  BeamSample s;
  s.x = sxy * normal(rng);
  s.y = sxy * normal(rng);
  const double z1 = normal(rng);
  const double z2 = normal(rng);
  s.theta1 = moments.mean_theta + l11 * z1;
  s.theta2 = moments.mean_theta + l21 * z1 + l22 * z2;
  s.phi = angle(rng);
  s.eta = transmissivity(s.x, s.y, semi_axis(params.beam_waist, s.theta1),
                         semi_axis(params.beam_waist, s.theta2), s.phi, params.aperture_radius);
  return s;
}

std::vector<BeamSample> sample_channel(const ChannelParams& params, int n, std::uint64_t seed,
                                       std::uint64_t stream) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  const auto moments = turbulence_moments(params);
  std::vector<BeamSample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng = make_substream(seed, stream, static_cast<std::uint64_t>(i));
    out.push_back(sample_beam(moments, params, rng));
  }
  return out;
}

void write_channel_csv(std::ostream& out, const std::vector<BeamSample>& samples,
                       const ChannelParams& params) {
  out << "sample,x,y,W1,W2,phi,eta\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    out << i;
    for (double v : {s.x, s.y, semi_axis(params.beam_waist, s.theta1),
                     semi_axis(params.beam_waist, s.theta2), s.phi, s.eta}) {
      out << ',';
      write_number(out, v);
    }
    out << '\n';
  }
}

TripartiteAmplitudes apply_pure_loss(const TripartiteAmplitudes& state, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("channel transmissivity must lie in [0, 1]");
  const auto& dims = state.dims();
  TripartiteAmplitudes out(dims, state.supermode_index());
  const double keep = std::sqrt(eta);
  const double lose = std::sqrt(1.0 - eta);
  for (const auto& x : state.entries()) {
    if (x.e != 0) throw std::logic_error("pure-loss channel needs a vacuum environment");
    const int n = x.b;
    double binom = 1.0;  // C(n, lost)
    for (int lost = 0; lost <= n; ++lost) {
      if (lost > 0) binom = binom * (n - lost + 1) / lost;
      if (lost > dims.n_e) break;
      const double w = std::sqrt(binom) * std::pow(keep, n - lost) * std::pow(lose, lost);
      if (w != 0.0) out.add(n - lost, x.d, lost, w * x.amp);
    }
  }
  return out;
}

}  // namespace ngsat
