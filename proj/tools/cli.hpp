#pragma once

// Command-line front end: config files, subcommands and output formats.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ngsat/pipeline.hpp"

namespace ngsat::cli {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2 };

/// Thrown for bad flags or config values; maps to kUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // [source]
  std::string spectrum = "single-dominant";
  int k_max = 5;
  PresetOptions preset;
  std::optional<std::filesystem::path> jsa_csv;
  // [channel]
  ChannelParams channel;
  std::string channel_mode = "fading";
  int samples = 10000;
  // [operation]
  Locale locale = Locale::Transmitter;
  std::vector<OpKind> ops{OpKind::Catalysis, OpKind::Subtraction, OpKind::Addition};
  DetectionStrategy strategy = DetectionStrategy::ZeroPhotonCatalysis;
  int truncation = 30;
  OptimizerSettings optimizer;
  double transmissivity = 0.5;
  // [sweep]
  std::string r1_db = "3";
  std::string eta_db = "10";
  // [output]
  std::string out;
  std::string format;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: available parallelism
};

/// "A:B:S" -> A, A+S, ... <= B; a bare number is a one-point grid.
std::vector<double> parse_grid(const std::string& spec);

std::vector<OpKind> parse_ops(const std::string& list);

/// Applies an INI-style file with [source], [channel], [operation], [sweep]
/// and [output] sections onto cfg. Unknown keys are errors.
void load_config_file(const std::filesystem::path& path, RunConfig& cfg);

/// Scenario template for a run config; spectrum gain is set per grid cell.
ScenarioConfig scenario_template(const RunConfig& cfg);

/// Rows sorted by (r1_db, eta_db, operation name).
std::string sweep_csv(const std::vector<SweepResult>& rows);

std::string format_number(double v);

struct CheckResult {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass() const { return deviation <= tolerance; }
};

/// Embedded oracle suite; tolerances are multiplied by tolerance_scale.
std::vector<CheckResult> validation_suite(double tolerance_scale = 1.0);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ngsat::cli
