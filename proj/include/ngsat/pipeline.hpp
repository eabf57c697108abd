#pragma once

// Transmitter- and receiver-side scenarios, per-realization optimization of
// the beam-splitter transmissivity, Monte Carlo averaging and grid sweeps.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "ngsat/channel.hpp"
#include "ngsat/fock.hpp"
#include "ngsat/metrics.hpp"
#include "ngsat/nongauss.hpp"
#include "ngsat/pdc.hpp"

namespace ngsat {

enum class Locale { Transmitter, Receiver };

std::string_view to_string(Locale locale);
/// Accepts "tx"/"transmitter" and "rx"/"receiver".
Locale parse_locale(std::string_view name);

enum class Objective { Gain, Rate };

struct FixedLoss {
  double eta = 1.0;
};

struct Fading {
  ChannelParams params;
  int n_samples = 10000;
  /// Mean transmissivity the ensemble is scaled to by a common extinction
  /// factor (capped at 1). Unset keeps the raw turbulence ensemble.
  std::optional<double> target_mean_eta;
};

using ChannelMode = std::variant<FixedLoss, Fading>;

struct OptimizerSettings {
  double grid_step = 0.01;
  double tolerance = 1e-6;  // final golden-section bracket width
  /// false evaluates every realization at operation.transmissivity.
  bool adapt_per_sample = true;
};

struct ScenarioConfig {
  Locale locale = Locale::Transmitter;
  NGOperation operation;
  SupermodeSpectrum spectrum{{1.0}, 0.0};
  Truncation truncation;
  DetectionStrategy strategy = DetectionStrategy::ZeroPhotonCatalysis;
  ChannelMode channel = FixedLoss{};
  Objective metric = Objective::Gain;
  OptimizerSettings optimizer;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Evaluates a scenario at one channel transmissivity for many T. Baseline
/// log-negativities and source ladders are computed once.
class ScenarioEvaluator {
 public:
  ScenarioEvaluator(const ScenarioConfig& config, double eta);

  GainRecord at(double transmissivity) const;
  const std::vector<double>& baseline_eln() const { return baseline_; }

 private:
  struct SupermodeResult {
    double eln;
    double probability;
    double tail_mass;
  };
  SupermodeResult evaluate_supermode(double r, const OccupationMap& map) const;

  ScenarioConfig config_;
  Truncation dims_;
  double eta_;
  std::vector<double> squeezings_;
  std::vector<double> baseline_;
  double baseline_tail_ = 0.0;
};

GainRecord run_transmitter(const ScenarioConfig& config, double eta);
GainRecord run_receiver(const ScenarioConfig& config, double eta);
/// Dispatches on config.locale.
GainRecord run_scenario(const ScenarioConfig& config, double eta);

struct Optimum {
  double transmissivity = 1.0;
  double value = 0.0;
  GainRecord record;
};

/// Maximizes a scalar function of T over (0, 1): grid of spacing step on
/// [step, 1 - step], then golden-section search on the bracket around the
/// best grid point down to the given tolerance. A bracket reaching an end of
/// (0, 1) also tries the clamped edge. Ties go to the larger T. A function
/// that is never positive on the grid yields (1, 0).
struct ScalarOptimum {
  double argmax = 1.0;
  double value = 0.0;
};
ScalarOptimum maximize_transmissivity(const std::function<double(double)>& f,
                                      const OptimizerSettings& settings = {});

Optimum optimize_T(const ScenarioConfig& config, double eta, Objective objective);

struct JointOptimum {
  Optimum gain;
  Optimum rate;
};
/// Both objectives, sharing the coarse-grid evaluations.
JointOptimum optimize_both(const ScenarioConfig& config, double eta);

struct CellResult {
  OpKind operation = OpKind::None;
  Locale locale = Locale::Transmitter;
  double mean_gain = 0.0;
  double mean_rate = 0.0;
  double stderr_gain = 0.0;
  double stderr_rate = 0.0;
  double mean_t_gain = 1.0;
  double mean_t_rate = 1.0;
  double mean_probability = 1.0;  // at the gain-optimal T
  double mean_eta = 1.0;
  double max_tail_mass = 0.0;
  int samples = 1;
};

/// Channel transmissivities for a scenario: the single fixed value, or the
/// scaled fading ensemble drawn from substreams (seed, cell, i).
std::vector<double> channel_ensemble(const ScenarioConfig& config, std::uint64_t cell = 0);

/// Optimized objectives averaged over the channel ensemble. Samples are
/// independent work units spread over `threads` workers; aggregation is in
/// sample order, so the result does not depend on the thread count.
CellResult monte_carlo_mean(const ScenarioConfig& config, std::uint64_t cell = 0, int threads = 1);

struct SweepGrid {
  std::vector<double> r1_db;
  std::vector<double> eta_db;
};

struct SweepResult {
  double r1_db = 0.0;
  double eta_db = 0.0;  // realized mean attenuation
  CellResult cell;
};

/// Every (r1, eta) cell for every operation. Rows are ordered by r1, then
/// eta, then operation in the order given.
std::vector<SweepResult> sweep(const SweepGrid& grid, const ScenarioConfig& base,
                               const std::vector<OpKind>& operations, int threads = 1);

/// Scenario for one grid cell: leading squeezing from dB and channel loss
/// (fixed, or the fading target) from dB.
ScenarioConfig cell_config(const ScenarioConfig& base, double r1_db, double eta_db);

/// Runs fn(i) for i in [0, n) on `threads` workers; rethrows the first error.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

double attenuation_db(double eta);
double transmissivity_from_db(double db);

}  // namespace ngsat
