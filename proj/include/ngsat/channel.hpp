#pragma once

// Earth-satellite fading channel: Hufnagel-Valley turbulence, elliptic-beam
// transmissivity, random channel realizations and the Fock-space pure-loss map.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "ngsat/fock.hpp"

namespace ngsat {

struct ChannelParams {
  double beam_waist = 0.06;          // W0 [m]
  double aperture_radius = 1.0;      // r0 [m]
  double wavelength = 795e-9;        // [m]
  double distance = 500e3;           // L [m]
  double zenith = 0.0;               // [rad]
  double ground_altitude = 0.0;      // h0 [m]
  double wind_speed = 6.0;           // rms v [m/s]
  double cn2_ground = 9.6e-14;       // A [m^-2/3]

  void validate() const;
};

struct TurbulenceMoments {
  double rytov_variance = 0.0;
  double scintillation_index = 0.0;
  double omega = 0.0;         // pi W0^2 / (L lambda)
  double mean_theta = 0.0;    // <theta_1> = <theta_2>, theta = ln(W^2 / W0^2)
  double var_theta = 0.0;
  double cov_theta = 0.0;
  double var_xy = 0.0;        // <dx^2> = <dy^2> [m^2]
};

struct BeamSample {
  double x = 0.0;
  double y = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double phi = 0.0;
  double eta = 0.0;
};

/// Hufnagel-Valley C_n^2(h).
double cn2_profile(double h, const ChannelParams& params);

/// 2.25 k^{7/6} sec^{11/6}(zenith) * integral over [h0, h0 + L] of
/// C_n^2(h) (h - h0)^{5/6}, by adaptive Gauss-Kronrod quadrature.
double rytov_variance(const ChannelParams& params);

/// Same prefactor for an arbitrary structure-constant profile.
template <class Profile>
double rytov_variance(const ChannelParams& params, Profile&& cn2);

double scintillation_index(double rytov_variance);

TurbulenceMoments turbulence_moments(const ChannelParams& params);
/// Beam moments for a given scintillation index; rytov_variance is left 0.
TurbulenceMoments beam_moments(const ChannelParams& params, double scintillation);

/// Captured fraction of an elliptic Gaussian beam with centroid (x, y),
/// semi-axes w1, w2 rotated by phi, on a circular aperture of radius r0.
double transmissivity(double x, double y, double w1, double w2, double phi, double r0);

using Rng = std::mt19937_64;

/// Independent generator for work unit (a, b) of a run seeded with master.
Rng make_substream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

BeamSample sample_beam(const TurbulenceMoments& moments, const ChannelParams& params, Rng& rng);

/// n samples; sample i draws from make_substream(seed, stream, i).
std::vector<BeamSample> sample_channel(const ChannelParams& params, int n, std::uint64_t seed,
                                       std::uint64_t stream = 0);

/// W1, W2 from the log semi-axis ratios.
inline double semi_axis(double beam_waist, double theta) { return beam_waist * std::exp(0.5 * theta); }

/// CSV with header sample,x,y,W1,W2,phi,eta; numbers with 17 significant digits.
void write_channel_csv(std::ostream& out, const std::vector<BeamSample>& samples,
                       const ChannelParams& params);

/// Pure-loss channel on B with vacuum environment:
/// |n> -> sum_n' sqrt(C(n, n')) sqrt(eta)^{n-n'} sqrt(1-eta)^{n'} |n - n'>_B |n'>_E.
/// Environment occupations above the truncation are dropped.
TripartiteAmplitudes apply_pure_loss(const TripartiteAmplitudes& state, double eta);

}  // namespace ngsat

#include "ngsat/detail/rytov.hpp"
