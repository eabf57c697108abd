#include "ngsat/pdc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ngsat {

void SupermodeSpectrum::validate() const {
  if (lambdas.empty()) throw std::invalid_argument("spectrum needs at least one supermode");
  double norm = 0.0;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] >= 0.0)) throw std::invalid_argument("Schmidt coefficients must be >= 0");
    if (k > 0 && lambdas[k] > lambdas[k - 1]) {
      throw std::invalid_argument("Schmidt coefficients must be non-increasing");
    }
    norm += lambdas[k] * lambdas[k];
  }
  if (std::abs(norm - 1.0) > 1e-10) {
    throw std::invalid_argument("Schmidt coefficients must have unit 2-norm");
  }
  if (!(gain >= 0.0)) throw std::invalid_argument("PDC gain must be >= 0");
}

SupermodeSpectrum SupermodeSpectrum::with_leading_squeezing(double r1) const {
  validate();
  if (!(lambdas.front() > 0.0)) throw std::invalid_argument("leading Schmidt coefficient is zero");
  SupermodeSpectrum out = *this;
  out.gain = r1 / lambdas.front();
  return out;
}

EprLadder epr_ladder(double r, int n_max) {
  if (!(r >= 0.0)) throw std::invalid_argument("squeezing parameter must be >= 0");
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  EprLadder ladder{r, std::vector<double>(n_max + 1)};
  const double t = std::tanh(r);
  const double q0 = 1.0 / std::cosh(r);
  double power = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    ladder.q[n] = q0 * power;
    power *= t;
  }
  return ladder;
}

TripartiteAmplitudes epr_state(double r, const Truncation& dims, int supermode_index,
                               double relative_floor) {
  const int n_max = std::min(dims.n_b, dims.n_d);
  const auto ladder = epr_ladder(r, n_max);
  TripartiteAmplitudes state(dims, supermode_index);
  for (int n = 0; n <= n_max; ++n) {
    if (ladder.q[n] == 0.0 || ladder.q[n] < relative_floor * ladder.q[0]) break;
    state.add(n, n, 0, ladder.q[n]);
  }
  return state;
}

double squeezing_db(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("squeezing parameter must be >= 0");
  return std::abs(-10.0 * std::log10(std::exp(2.0 * r)));
}

double squeezing_from_db(double db) {
  if (!(db >= 0.0)) throw std::invalid_argument("squeezing in dB must be >= 0");
  return db * std::numbers::ln10 / 20.0;
}

SchmidtDecomposition schmidt_decompose(const Eigen::MatrixXd& jsa) {
  if (jsa.size() == 0) throw std::invalid_argument("empty JSA matrix");
  if (!jsa.allFinite()) throw std::invalid_argument("JSA matrix has non-finite entries");
  const double scale = jsa.norm();
  if (!(scale > 0.0)) throw std::invalid_argument("JSA matrix is identically zero");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jsa / scale, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("SVD of the JSA failed");

  const Eigen::VectorXd& sv = svd.singularValues();
  SchmidtDecomposition out;
  out.scale = scale;
  out.spectrum.gain = 1.0;
  const double norm = sv.norm();
  out.spectrum.lambdas.resize(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) out.spectrum.lambdas[k] = sv(k) / norm;
  out.scale = scale * norm;

  out.basis.phi = svd.matrixU().transpose();
  out.basis.psi = svd.matrixV().transpose();
  for (Eigen::Index k = 0; k < out.basis.phi.rows(); ++k) {
    Eigen::Index pivot = 0;
    out.basis.phi.row(k).cwiseAbs().maxCoeff(&pivot);
    if (out.basis.phi(k, pivot) < 0.0) {
      out.basis.phi.row(k) *= -1.0;
      out.basis.psi.row(k) *= -1.0;
    }
  }
  return out;
}

SpectrumPreset parse_spectrum_preset(std::string_view name) {
  if (name == "single-dominant") return SpectrumPreset::SingleDominant;
  if (name == "decaying") return SpectrumPreset::Decaying;
  if (name == "flat") return SpectrumPreset::Flat;
  throw std::invalid_argument("unknown spectrum preset '" + std::string(name) + "'");
}

std::string_view to_string(SpectrumPreset preset) {
  switch (preset) {
    case SpectrumPreset::SingleDominant: return "single-dominant";
    case SpectrumPreset::Decaying: return "decaying";
    case SpectrumPreset::Flat: return "flat";
  }
  return "flat";
}

SupermodeSpectrum preset_spectrum(SpectrumPreset preset, int k_max, double gain,
                                  const PresetOptions& options) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  std::vector<double> lambdas(k_max);
  switch (preset) {
    case SpectrumPreset::SingleDominant: {
      const double eps = options.suppressed_level;
      const double rest = (k_max - 1) * eps * eps;
      if (!(eps >= 0.0) || rest >= 0.5) {
        throw std::invalid_argument("suppressed level too large for a single-dominant spectrum");
      }
      lambdas[0] = std::sqrt(1.0 - rest);
      std::fill(lambdas.begin() + 1, lambdas.end(), eps);
      break;
    }
    case SpectrumPreset::Decaying: {
      const double ratio = options.decay_ratio;
      if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("decay ratio must lie in (0, 1]");
      double norm = 0.0;
      for (int k = 0; k < k_max; ++k) {
        lambdas[k] = std::pow(ratio, k);
        norm += lambdas[k] * lambdas[k];
      }
      for (double& l : lambdas) l /= std::sqrt(norm);
      break;
    }
    case SpectrumPreset::Flat:
      std::fill(lambdas.begin(), lambdas.end(), 1.0 / std::sqrt(static_cast<double>(k_max)));
      break;
  }
  SupermodeSpectrum spectrum{std::move(lambdas), gain};
  spectrum.validate();
  return spectrum;
}

SupermodeSpectrum preset_spectrum(std::string_view name, int k_max, double gain,
                                  const PresetOptions& options) {
  return preset_spectrum(parse_spectrum_preset(name), k_max, gain, options);
}

Eigen::MatrixXd double_gaussian_jsa(int bins, double half_width, double pump_width,
                                    double phase_match_width) {
  if (bins < 1) throw std::invalid_argument("JSA needs at least one bin");
  if (!(pump_width > 0.0 && phase_match_width > 0.0 && half_width > 0.0)) {
    throw std::invalid_argument("JSA widths must be positive");
  }
  Eigen::MatrixXd jsa(bins, bins);
  auto grid = [&](int i) {
    return bins == 1 ? 0.0 : -half_width + 2.0 * half_width * i / (bins - 1);
  };
  for (int i = 0; i < bins; ++i) {
    for (int j = 0; j < bins; ++j) {
      const double sum = grid(i) + grid(j);
      const double diff = grid(i) - grid(j);
      jsa(i, j) = std::exp(-sum * sum / (2.0 * pump_width * pump_width)) *
                  std::exp(-diff * diff / (2.0 * phase_match_width * phase_match_width));
    }
  }
  return jsa / jsa.norm();
}

Eigen::MatrixXd read_jsa_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open JSA file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      try {
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw std::runtime_error("JSA file " + path.string() + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("JSA file " + path.string() + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("JSA file " + path.string() + " is empty");
  Eigen::MatrixXd jsa(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) jsa(i, j) = rows[i][j];
  return jsa;
}

}  // namespace ngsat
