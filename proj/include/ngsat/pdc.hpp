#pragma once

// Parametric down-conversion sources: Schmidt spectra, per-supermode
// two-mode squeezed vacuum ladders and JSA decomposition.

#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ngsat/fock.hpp"

namespace ngsat {

struct SupermodeSpectrum {
  std::vector<double> lambdas;  // non-increasing, unit 2-norm
  double gain = 1.0;

  int k_max() const { return static_cast<int>(lambdas.size()); }
  double squeezing(int k) const { return gain * lambdas.at(k - 1); }

  void validate() const;
  /// Copy with the gain chosen so the leading supermode has squeezing r1.
  SupermodeSpectrum with_leading_squeezing(double r1) const;
};

/// Rows of phi are signal (B) profiles, rows of psi idler (D) profiles.
struct SupermodeBasis {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd psi;
};

struct EprLadder {
  double r = 0.0;
  std::vector<double> q;  // q[n] = sech(r) tanh(r)^n
};

EprLadder epr_ladder(double r, int n_max);

/// |EPR> = sum_n q_n |n, n, 0> on (B, D, E), cut at n <= min(n_b, n_d) and
/// where q_n first drops below relative_floor * q_0.
TripartiteAmplitudes epr_state(double r, const Truncation& dims, int supermode_index = 1,
                               double relative_floor = 0.0);

/// Squeezing magnitude in dB, 10 log10(e^{2r}). The defining expression
/// -10 log10(e^{2r}) is negative for r > 0; magnitudes are reported.
double squeezing_db(double r);
double squeezing_from_db(double db);

struct SchmidtDecomposition {
  SupermodeSpectrum spectrum;  // gain 1
  SupermodeBasis basis;
  double scale = 0.0;          // Frobenius norm of the input
};

/// SVD of a JSA matrix (rows = signal bins, columns = idler bins):
/// jsa = scale * sum_k lambda_k phi_k psi_k^T. Each phi row is signed so its
/// largest-magnitude entry is positive.
SchmidtDecomposition schmidt_decompose(const Eigen::MatrixXd& jsa);

enum class SpectrumPreset { SingleDominant, Decaying, Flat };

SpectrumPreset parse_spectrum_preset(std::string_view name);
std::string_view to_string(SpectrumPreset preset);

struct PresetOptions {
  double suppressed_level = 1e-3;  // single-dominant: lambda_k for k >= 2
  double decay_ratio = 0.7;        // decaying: lambda_k ~ ratio^(k-1)
};

SupermodeSpectrum preset_spectrum(SpectrumPreset preset, int k_max, double gain,
                                  const PresetOptions& options = {});
SupermodeSpectrum preset_spectrum(std::string_view name, int k_max, double gain,
                                  const PresetOptions& options = {});

/// Pump envelope times phase matching on a symmetric detuning grid:
/// exp(-(ws + wi)^2 / (2 sp^2)) * exp(-(ws - wi)^2 / (2 sc^2)), unit Frobenius norm.
Eigen::MatrixXd double_gaussian_jsa(int bins, double half_width, double pump_width,
                                    double phase_match_width);

Eigen::MatrixXd read_jsa_csv(const std::filesystem::path& path);

}  // namespace ngsat
