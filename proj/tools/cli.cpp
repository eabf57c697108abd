#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "json.hpp"

namespace ngsat::cli {

namespace {

using json = nlohmann::ordered_json;

double parse_double(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw UsageError(field + ": expected a number, got '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& text, const std::string& field) {
  const double v = parse_double(text, field);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError(field + ": expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

std::uint64_t parse_seed(const std::string& text, const std::string& field) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError(field + ": expected an unsigned 64-bit integer, got '" + text + "'");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw UsageError(field + ": value out of range '" + text + "'");
  }
}

bool parse_bool(const std::string& text, const std::string& field) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw UsageError(field + ": expected true or false, got '" + text + "'");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\"");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\"");
  return s.substr(a, b - a + 1);
}

DetectionStrategy parse_strategy(const std::string& name) {
  if (name == "zero-photon-catalysis") return DetectionStrategy::ZeroPhotonCatalysis;
  if (name == "untouched") return DetectionStrategy::Untouched;
  throw UsageError("strategy: expected zero-photon-catalysis or untouched, got '" + name + "'");
}

template <class F>
auto wrap_usage(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(field + ": " + e.what());
  }
}

std::vector<OpKind> sorted_ops(std::vector<OpKind> ops) {
  std::sort(ops.begin(), ops.end(), [](OpKind a, OpKind b) { return to_string(a) < to_string(b); });
  ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
  return ops;
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  file << text;
  if (!file) throw std::runtime_error("failed writing output file " + path);
}

json record_json(const CellResult& c) {
  return json{{"operation", std::string(to_string(c.operation))},
              {"locale", std::string(to_string(c.locale))},
              {"G_tot_opt", c.mean_gain},
              {"R_tot_opt", c.mean_rate},
              {"T_opt_G", c.mean_t_gain},
              {"T_opt_R", c.mean_t_rate},
              {"P", c.mean_probability},
              {"stderr_G", c.stderr_gain},
              {"stderr_R", c.stderr_rate}};
}

void warn_tail(const CellResult& c, std::ostream& err) {
  if (c.max_tail_mass > kTailMassLimit) {
    err << "warning: truncation tail mass " << format_number(c.max_tail_mass) << " exceeds "
        << kTailMassLimit << " for " << to_string(c.operation)
        << "; log-negativities are lower bounds, raise the truncation\n";
  }
}

struct Flags {
  std::string config;
  std::string seed;
  int samples = 0;
  int threads = 0;
  std::string out;
  std::string format;
  std::string r1_db;
  std::string eta_db;
  std::string locale;
  std::string ops;
  std::string channel_mode;
  std::string spectrum;
  int k_max = 0;
  int truncation = 0;
  std::string strategy;
};

void add_flags(CLI::App* app, Flags& f, bool scenario) {
  app->add_option("--config", f.config, "config file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "master seed (unsigned 64-bit)");
  app->add_option("--samples", f.samples, "channel realizations")->check(CLI::PositiveNumber);
  app->add_option("--out", f.out, "output path (default: standard output)");
  if (!scenario) return;
  app->add_option("--threads", f.threads, "worker threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
  app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--r1-db", f.r1_db, "leading-supermode squeezing grid A:B:S in dB");
  app->add_option("--eta-db", f.eta_db, "mean attenuation grid A:B:S in dB");
  app->add_option("--locale", f.locale, "tx or rx")->check(CLI::IsMember({"tx", "rx"}));
  app->add_option("--ops", f.ops, "comma-separated operations");
  app->add_option("--channel", f.channel_mode, "fading or fixed")->check(CLI::IsMember({"fading", "fixed"}));
  app->add_option("--spectrum", f.spectrum, "single-dominant, decaying or flat");
  app->add_option("--kmax", f.k_max, "number of supermodes")->check(CLI::PositiveNumber);
  app->add_option("--truncation", f.truncation, "maximum occupation per mode")->check(CLI::PositiveNumber);
  app->add_option("--strategy", f.strategy, "zero-photon-catalysis or untouched");
}

RunConfig resolve(CLI::App* app, const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) load_config_file(f.config, cfg);
  auto given = [&](const char* name) {
    try {
      return app->get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--seed")) cfg.seed = parse_seed(f.seed, "--seed");
  if (given("--samples")) cfg.samples = f.samples;
  if (given("--threads")) cfg.threads = f.threads;
  if (given("--out")) cfg.out = f.out;
  if (given("--format")) cfg.format = f.format;
  if (given("--r1-db")) cfg.r1_db = f.r1_db;
  if (given("--eta-db")) cfg.eta_db = f.eta_db;
  if (given("--locale")) cfg.locale = parse_locale(f.locale);
  if (given("--ops")) cfg.ops = parse_ops(f.ops);
  if (given("--channel")) cfg.channel_mode = f.channel_mode;
  if (given("--spectrum")) cfg.spectrum = f.spectrum;
  if (given("--kmax")) cfg.k_max = f.k_max;
  if (given("--truncation")) cfg.truncation = f.truncation;
  if (given("--strategy")) cfg.strategy = parse_strategy(f.strategy);
  if (cfg.samples < 1) throw UsageError("samples must be >= 1");
  wrap_usage("[channel]", [&] { cfg.channel.validate(); });
  return cfg;
}

int cmd_channel(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto samples = sample_channel(cfg.channel, cfg.samples, cfg.seed);
  std::ostringstream csv;
  write_channel_csv(csv, samples, cfg.channel);
  emit(csv.str(), cfg.out, out);

  double mean = 0.0;
  for (const auto& s : samples) mean += s.eta;
  mean /= samples.size();
  double ss = 0.0;
  for (const auto& s : samples) ss += (s.eta - mean) * (s.eta - mean);
  const double se = samples.size() > 1 ? std::sqrt(ss / (samples.size() - 1) / samples.size()) : 0.0;
  std::ostream& summary = cfg.out.empty() ? err : out;
  summary << "samples " << samples.size() << "\n"
          << "mean_eta " << format_number(mean) << "\n"
          << "mean_attenuation_db " << format_number(attenuation_db(mean)) << "\n"
          << "stderr_eta " << format_number(se) << "\n";
  return kOk;
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto r1 = parse_grid(cfg.r1_db);
  const auto eta = parse_grid(cfg.eta_db);
  if (r1.size() != 1 || eta.size() != 1) {
    throw UsageError("run evaluates one grid point; give single values for --r1-db and --eta-db");
  }
  const ScenarioConfig base = cell_config(scenario_template(cfg), r1[0], eta[0]);
  std::vector<CellResult> cells;
  for (OpKind op : sorted_ops(cfg.ops)) {
    ScenarioConfig c = base;
    c.operation.kind = op;
    cells.push_back(monte_carlo_mean(c, 0, resolve_threads(cfg.threads)));
    warn_tail(cells.back(), err);
  }

  std::string text;
  if (cfg.format == "csv") {
    text = "operation,locale,G_tot_opt,R_tot_opt,T_opt_G,T_opt_R,P,stderr_G,stderr_R\n";
    for (const auto& c : cells) {
      text += std::string(to_string(c.operation)) + "," + std::string(to_string(c.locale));
      for (double v : {c.mean_gain, c.mean_rate, c.mean_t_gain, c.mean_t_rate, c.mean_probability,
                       c.stderr_gain, c.stderr_rate})
        text += "," + format_number(v);
      text += "\n";
    }
  } else {
    json arr = json::array();
    for (const auto& c : cells) arr.push_back(record_json(c));
    text = arr.dump(2) + "\n";
  }
  emit(text, cfg.out, out);
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SweepGrid grid{parse_grid(cfg.r1_db), parse_grid(cfg.eta_db)};
  const auto rows = sweep(grid, scenario_template(cfg), sorted_ops(cfg.ops), resolve_threads(cfg.threads));
  for (const auto& row : rows) warn_tail(row.cell, err);

  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      json j = record_json(row.cell);
      j["r1_db"] = row.r1_db;
      j["eta_db"] = row.eta_db;
      arr.push_back(std::move(j));
    }
    emit(arr.dump(2) + "\n", cfg.out, out);
  } else {
    emit(sweep_csv(rows), cfg.out, out);
  }
  return kOk;
}

int cmd_validate(std::ostream& out) {
  double scale = 1.0;
  if (const char* env = std::getenv("NGSAT_VALIDATE_TOL_SCALE")) {
    scale = parse_double(env, "NGSAT_VALIDATE_TOL_SCALE");
    if (!(scale >= 0.0)) throw UsageError("NGSAT_VALIDATE_TOL_SCALE must be >= 0");
  }
  const auto checks = validation_suite(scale);
  bool ok = true;
  char line[160];
  std::snprintf(line, sizeof line, "%-40s %-12s %-12s %s\n", "check", "deviation", "tolerance", "result");
  out << line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-40s %-12.3e %-12.3e %s\n", c.name.c_str(), c.deviation,
                  c.tolerance, c.pass() ? "PASS" : "FAIL");
    out << line;
    ok = ok && c.pass();
  }
  out << (ok ? "all checks passed\n" : "validation FAILED\n");
  return ok ? kOk : kFailure;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
  return buf;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(trim(part));
  if (parts.size() == 1) return {parse_double(parts[0], "grid '" + spec + "'")};
  if (parts.size() != 3) throw UsageError("grid '" + spec + "': expected A:B:S");
  const double a = parse_double(parts[0], "grid start");
  const double b = parse_double(parts[1], "grid stop");
  const double s = parse_double(parts[2], "grid step");
  if (!(s > 0.0)) throw UsageError("grid '" + spec + "': step must be > 0");
  if (b < a) throw UsageError("grid '" + spec + "': stop is below start");
  const double n = std::floor((b - a) / s + 1e-9);
  if (n > 1e6) throw UsageError("grid '" + spec + "' has too many points");
  std::vector<double> out;
  for (int i = 0; i <= static_cast<int>(n); ++i) out.push_back(a + i * s);
  return out;
}

std::vector<OpKind> parse_ops(const std::string& list) {
  std::vector<OpKind> ops;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    name = trim(name);
    if (name.empty()) continue;
    const OpKind k = wrap_usage("--ops", [&] { return parse_op_kind(name); });
    if (k == OpKind::None) throw UsageError("--ops: 'none' is not an operation to optimize");
    ops.push_back(k);
  }
  if (ops.empty()) throw UsageError("operation list is empty");
  return ops;
}

void load_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  for (const auto& [section, entries] : tree) {
    if (!entries.data().empty()) throw UsageError("config: key '" + section + "' outside a section");
    for (const auto& [key, node] : entries) {
      const std::string field = "[" + section + "] " + key;
      const std::string v = trim(node.data());
      auto num = [&] { return parse_double(v, field); };
      auto& ch = cfg.channel;
      if (section == "source") {
        if (key == "spectrum") cfg.spectrum = v;
        else if (key == "k_max") cfg.k_max = parse_int(v, field);
        else if (key == "suppressed_level") cfg.preset.suppressed_level = num();
        else if (key == "decay_ratio") cfg.preset.decay_ratio = num();
        else if (key == "jsa_csv") cfg.jsa_csv = std::filesystem::path(v);
        else if (key == "r1_db") cfg.r1_db = v;
        else throw UsageError("config: unknown key " + field);
      } else if (section == "channel") {
        if (key == "mode") cfg.channel_mode = v;
        else if (key == "samples") cfg.samples = parse_int(v, field);
        else if (key == "eta_db") cfg.eta_db = v;
        else if (key == "beam_waist") ch.beam_waist = num();
        else if (key == "aperture_radius") ch.aperture_radius = num();
        else if (key == "wavelength") ch.wavelength = num();
        else if (key == "distance") ch.distance = num();
        else if (key == "zenith") ch.zenith = num();
        else if (key == "ground_altitude") ch.ground_altitude = num();
        else if (key == "wind_speed") ch.wind_speed = num();
        else if (key == "cn2_ground") ch.cn2_ground = num();
        else throw UsageError("config: unknown key " + field);
      } else if (section == "operation") {
        if (key == "locale") cfg.locale = wrap_usage(field, [&] { return parse_locale(v); });
        else if (key == "ops") cfg.ops = parse_ops(v);
        else if (key == "strategy") cfg.strategy = parse_strategy(v);
        else if (key == "truncation") cfg.truncation = parse_int(v, field);
        else if (key == "adapt_per_sample") cfg.optimizer.adapt_per_sample = parse_bool(v, field);
        else if (key == "transmissivity") cfg.transmissivity = num();
        else if (key == "grid_step") cfg.optimizer.grid_step = num();
        else if (key == "tolerance") cfg.optimizer.tolerance = num();
        else throw UsageError("config: unknown key " + field);
      } else if (section == "sweep") {
        if (key == "r1_db") cfg.r1_db = v;
        else if (key == "eta_db") cfg.eta_db = v;
        else throw UsageError("config: unknown key " + field);
      } else if (section == "output") {
        if (key == "path") cfg.out = v;
        else if (key == "format") cfg.format = v;
        else if (key == "seed") cfg.seed = parse_seed(v, field);
        else if (key == "threads") cfg.threads = parse_int(v, field);
        else throw UsageError("config: unknown key " + field);
      } else {
        throw UsageError("config: unknown section [" + section + "]");
      }
    }
  }
  if (!cfg.format.empty() && cfg.format != "csv" && cfg.format != "json") {
    throw UsageError("[output] format: expected csv or json, got '" + cfg.format + "'");
  }
  if (cfg.channel_mode != "fading" && cfg.channel_mode != "fixed") {
    throw UsageError("[channel] mode: expected fading or fixed, got '" + cfg.channel_mode + "'");
  }
}

ScenarioConfig scenario_template(const RunConfig& cfg) {
  ScenarioConfig c;
  c.locale = cfg.locale;
  c.operation = {OpKind::Catalysis, cfg.transmissivity};
  c.spectrum = wrap_usage("[source]", [&] {
    if (!cfg.jsa_csv) return preset_spectrum(cfg.spectrum, cfg.k_max, 1.0, cfg.preset);
    auto spectrum = schmidt_decompose(read_jsa_csv(*cfg.jsa_csv)).spectrum;
    spectrum.lambdas.resize(std::min<std::size_t>(spectrum.lambdas.size(), cfg.k_max));
    double norm = 0.0;
    for (double l : spectrum.lambdas) norm += l * l;
    for (double& l : spectrum.lambdas) l /= std::sqrt(norm);
    return spectrum;
  });
  c.truncation = Truncation{cfg.truncation, cfg.truncation, cfg.truncation};
  c.strategy = cfg.strategy;
  if (cfg.channel_mode == "fixed") {
    c.channel = FixedLoss{};
  } else {
    Fading f;
    f.params = cfg.channel;
    f.n_samples = cfg.samples;
    c.channel = f;
  }
  c.optimizer = cfg.optimizer;
  c.seed = cfg.seed;
  wrap_usage("[operation]", [&] { c.validate(); });
  return c;
}

std::string sweep_csv(const std::vector<SweepResult>& rows) {
  std::vector<const SweepResult*> order;
  for (const auto& r : rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const SweepResult* a, const SweepResult* b) {
    if (a->r1_db != b->r1_db) return a->r1_db < b->r1_db;
    if (a->eta_db != b->eta_db) return a->eta_db < b->eta_db;
    return to_string(a->cell.operation) < to_string(b->cell.operation);
  });
  std::string text = "r1_db,eta_db,operation,locale,G_opt,R_opt,T_opt,stderr\n";
  for (const auto* r : order) {
    text += format_number(r->r1_db) + "," + format_number(r->eta_db) + "," +
            std::string(to_string(r->cell.operation)) + "," + std::string(to_string(r->cell.locale)) + "," +
            format_number(r->cell.mean_gain) + "," + format_number(r->cell.mean_rate) + "," +
            format_number(r->cell.mean_t_gain) + "," + format_number(r->cell.stderr_gain) + "\n";
  }
  return text;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-Gaussian operations on PDC states over Earth-satellite channels", "ngsat"};
  app.require_subcommand(1);
  Flags flags;
  auto* channel = app.add_subcommand("channel", "sample the fading channel and write a CSV");
  auto* run_cmd = app.add_subcommand("run", "optimize every operation at one grid point");
  auto* sweep_cmd = app.add_subcommand("sweep", "optimize every operation over a grid");
  auto* validate = app.add_subcommand("validate", "run the built-in oracle suite");
  add_flags(channel, flags, false);
  add_flags(run_cmd, flags, true);
  add_flags(sweep_cmd, flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(out);
    CLI::App* cmd = channel->parsed() ? channel : run_cmd->parsed() ? run_cmd : sweep_cmd;
    RunConfig cfg = resolve(cmd, flags);
    if (cmd == channel) return cmd_channel(cfg, out, err);
    if (cmd == run_cmd) return cmd_run(cfg, out, err);
    return cmd_sweep(cfg, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace ngsat::cli
