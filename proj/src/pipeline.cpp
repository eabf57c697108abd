#include "ngsat/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace ngsat {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleStats {
  double mean = 0.0;
  double standard_error = 0.0;
};

SampleStats stats(const std::vector<double>& xs) {
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  const double n = static_cast<double>(xs.size());
  SampleStats s;
  s.mean = sum.value() / n;
  if (xs.size() > 1) {
    CompensatedSum sq;
    for (double x : xs) sq.add((x - s.mean) * (x - s.mean));
    s.standard_error = std::sqrt(sq.value() / (n - 1.0) / n);
  }
  return s;
}

double objective_value(const GainRecord& rec, Objective objective) {
  return objective == Objective::Gain ? rec.gain : rec.rate;
}

constexpr double kInvPhi = 0.6180339887498948482;

struct Probe {
  double t;
  double value;
};

// Golden-section maximization on [lo, hi]; returns the best point evaluated.
Probe golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (lo + hi);
  Probe best{mid, f(mid)};
  for (Probe p : {Probe{c, fc}, Probe{d, fd}}) {
    if (p.value > best.value || (p.value == best.value && p.t > best.t)) best = p;
  }
  return best;
}

std::vector<double> transmissivity_grid(const OptimizerSettings& s) {
  if (!(s.grid_step > 0.0 && s.grid_step < 0.5)) {
    throw std::invalid_argument("optimizer grid step must lie in (0, 0.5)");
  }
  const int n = static_cast<int>(std::floor(1.0 / s.grid_step + 1e-9));
  std::vector<double> grid;
  for (int i = 1; i < n; ++i) grid.push_back(i * s.grid_step);
  return grid;
}

constexpr double kLowerT = 1e-6;
constexpr double kUpperT = 1.0 - 1e-9;

// Source amplitudes below this fraction of q_0 are not propagated; they move
// eigenvalues by far less than kTolEig.
constexpr double kAmplitudeFloor = 1e-17;

}  // namespace

std::string_view to_string(Locale locale) {
  return locale == Locale::Transmitter ? "tx" : "rx";
}

Locale parse_locale(std::string_view name) {
  if (name == "tx" || name == "transmitter") return Locale::Transmitter;
  if (name == "rx" || name == "receiver") return Locale::Receiver;
  throw std::invalid_argument("unknown locale '" + std::string(name) + "' (expected tx or rx)");
}

void ScenarioConfig::validate() const {
  operation.validate();
  spectrum.validate();
  truncation.validate();
  if (const auto* fixed = std::get_if<FixedLoss>(&channel)) {
    if (!(fixed->eta >= 0.0 && fixed->eta <= 1.0)) {
      throw std::invalid_argument("fixed-loss transmissivity must lie in [0, 1]");
    }
  } else {
    const auto& fading = std::get<Fading>(channel);
    fading.params.validate();
    if (fading.n_samples < 1) throw std::invalid_argument("fading mode needs n_samples >= 1");
    if (fading.target_mean_eta && !(*fading.target_mean_eta > 0.0 && *fading.target_mean_eta <= 1.0)) {
      throw std::invalid_argument("target mean transmissivity must lie in (0, 1]");
    }
  }
  if (!(optimizer.tolerance > 0.0)) throw std::invalid_argument("optimizer tolerance must be positive");
}

ScenarioEvaluator::ScenarioEvaluator(const ScenarioConfig& config, double eta)
    : config_(config), eta_(eta) {
  config_.validate();
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("channel transmissivity must lie in [0, 1]");
  dims_ = config_.operation.kind == OpKind::Addition ? config_.truncation.with_addition_headroom()
                                                       : config_.truncation;
  std::map<double, SupermodeResult> cache;
  for (int k = 1; k <= config_.spectrum.k_max(); ++k) {
    const double r = config_.spectrum.squeezing(k);
    squeezings_.push_back(r);
    auto it = cache.find(r);
    if (it == cache.end()) it = cache.emplace(r, evaluate_supermode(r, identity_map())).first;
    baseline_.push_back(it->second.eln);
    baseline_tail_ = std::max(baseline_tail_, it->second.tail_mass);
  }
}

ScenarioEvaluator::SupermodeResult ScenarioEvaluator::evaluate_supermode(
    double r, const OccupationMap& map) const {
  TripartiteAmplitudes state = epr_state(r, dims_, 1, kAmplitudeFloor);
  if (config_.locale == Locale::Transmitter) {
    state = apply_pure_loss(apply_occupation_map(map, state), eta_);
  } else {
    state = apply_occupation_map(map, apply_pure_loss(state, eta_));
  }
  const double p = state.squared_norm();
  if (!(p > 0.0)) return {0.0, 0.0, 0.0};
  return {log_negativity(state), p, state.tail_mass()};
}

GainRecord ScenarioEvaluator::at(double transmissivity) const {
  NGOperation op = config_.operation;
  op.transmissivity = transmissivity;
  op.validate();
  const OccupationMap lead = leading_map(op);
  const OccupationMap companion = companion_map(op, config_.strategy);

  std::vector<double> eln(squeezings_.size());
  double probability = 1.0;
  double tail = baseline_tail_;
  std::map<double, SupermodeResult> cache;
  for (std::size_t k = 0; k < squeezings_.size(); ++k) {
    SupermodeResult res;
    if (k == 0) {
      res = evaluate_supermode(squeezings_[k], lead);
    } else {
      auto it = cache.find(squeezings_[k]);
      if (it == cache.end()) {
        it = cache.emplace(squeezings_[k], evaluate_supermode(squeezings_[k], companion)).first;
      }
      res = it->second;
    }
    eln[k] = res.eln;
    probability *= res.probability;
    tail = std::max(tail, res.tail_mass);
  }

  GainRecord rec;
  if (probability > 0.0) {
    rec = total_gain(eln, baseline_, probability);
  } else {
    rec.eln = eln;
    rec.baseline_eln = baseline_;
    rec.gain = 0.0;
    rec.probability = 0.0;
    rec.rate = 0.0;
  }
  rec.tail_mass = tail;
  return rec;
}

GainRecord run_transmitter(const ScenarioConfig& config, double eta) {
  ScenarioConfig c = config;
  c.locale = Locale::Transmitter;
  return ScenarioEvaluator(c, eta).at(c.operation.transmissivity);
}

GainRecord run_receiver(const ScenarioConfig& config, double eta) {
  ScenarioConfig c = config;
  c.locale = Locale::Receiver;
  return ScenarioEvaluator(c, eta).at(c.operation.transmissivity);
}

GainRecord run_scenario(const ScenarioConfig& config, double eta) {
  return ScenarioEvaluator(config, eta).at(config.operation.transmissivity);
}

ScalarOptimum maximize_transmissivity(const std::function<double(double)>& f,
                                      const OptimizerSettings& settings) {
  const auto grid = transmissivity_grid(settings);
  double best_t = 1.0;
  double best = 0.0;
  bool found = false;
  for (double t : grid) {
    const double v = f(t);
    if (v > 0.0 && (!found || v >= best)) {
      best = v;
      best_t = t;
      found = true;
    }
  }
  if (!found) return {1.0, 0.0};

  const double lo = std::max(best_t - settings.grid_step, kLowerT);
  const double hi = std::min(best_t + settings.grid_step, kUpperT);
  std::vector<Probe> candidates{{best_t, best}, golden_section_max(f, lo, hi, settings.tolerance)};
  // Objectives that keep rising into an end of (0, 1) peak at the clamped edge.
  if (hi == kUpperT) candidates.push_back({kUpperT, f(kUpperT)});
  if (lo == kLowerT) candidates.push_back({kLowerT, f(kLowerT)});
  Probe top = candidates.front();
  for (const Probe& p : candidates) {
    if (p.value > top.value || (p.value == top.value && p.t > top.t)) top = p;
  }
  return {top.t, top.value};
}

JointOptimum optimize_both(const ScenarioConfig& config, double eta) {
  const ScenarioEvaluator evaluator(config, eta);
  JointOptimum out;
  if (config.operation.kind == OpKind::None) {
    out.gain.record = evaluator.at(1.0);
    out.rate.record = out.gain.record;
    return out;
  }

  // Shared coarse grid: memoize evaluations by T.
  std::map<double, GainRecord> memo;
  auto record_at = [&](double t) -> const GainRecord& {
    auto it = memo.find(t);
    if (it == memo.end()) it = memo.emplace(t, evaluator.at(t)).first;
    return it->second;
  };
  for (Objective objective : {Objective::Gain, Objective::Rate}) {
    const auto best = maximize_transmissivity(
        [&](double t) { return objective_value(record_at(t), objective); }, config.optimizer);
    Optimum opt{best.argmax, best.value, record_at(best.argmax)};
    if (best.value <= 0.0) opt.value = 0.0;
    (objective == Objective::Gain ? out.gain : out.rate) = std::move(opt);
  }
  return out;
}

Optimum optimize_T(const ScenarioConfig& config, double eta, Objective objective) {
  const auto both = optimize_both(config, eta);
  return objective == Objective::Gain ? both.gain : both.rate;
}

std::vector<double> channel_ensemble(const ScenarioConfig& config, std::uint64_t cell) {
  if (const auto* fixed = std::get_if<FixedLoss>(&config.channel)) return {fixed->eta};
  const auto& fading = std::get<Fading>(config.channel);
  const auto samples = sample_channel(fading.params, fading.n_samples, config.seed, cell);
  std::vector<double> etas;
  etas.reserve(samples.size());
  for (const auto& s : samples) etas.push_back(s.eta);
  if (fading.target_mean_eta) {
    const double raw_mean = stats(etas).mean;
    const double factor = raw_mean > 0.0 ? std::min(1.0, *fading.target_mean_eta / raw_mean) : 1.0;
    for (double& e : etas) e = std::min(1.0, e * factor);
  }
  return etas;
}

CellResult monte_carlo_mean(const ScenarioConfig& config, std::uint64_t cell, int threads) {
  config.validate();
  const auto etas = channel_ensemble(config, cell);
  const std::size_t n = etas.size();

  struct PerSample {
    double gain, rate, t_gain, t_rate, probability, tail;
  };
  std::vector<PerSample> results(n);
  parallel_for(n, threads, [&](std::size_t i) {
    if (config.optimizer.adapt_per_sample) {
      const auto opt = optimize_both(config, etas[i]);
      results[i] = {opt.gain.value, opt.rate.value, opt.gain.transmissivity, opt.rate.transmissivity,
                    opt.gain.record.probability,
                    std::max(opt.gain.record.tail_mass, opt.rate.record.tail_mass)};
    } else {
      const auto rec = run_scenario(config, etas[i]);
      const double t = config.operation.kind == OpKind::None ? 1.0 : config.operation.transmissivity;
      results[i] = {rec.gain, rec.rate, t, t, rec.probability, rec.tail_mass};
    }
  });

  auto column = [&](double PerSample::*field) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = results[i].*field;
    return v;
  };
  CellResult out;
  out.operation = config.operation.kind;
  out.locale = config.locale;
  out.samples = static_cast<int>(n);
  const auto g = stats(column(&PerSample::gain));
  const auto r = stats(column(&PerSample::rate));
  out.mean_gain = g.mean;
  out.stderr_gain = g.standard_error;
  out.mean_rate = r.mean;
  out.stderr_rate = r.standard_error;
  out.mean_t_gain = stats(column(&PerSample::t_gain)).mean;
  out.mean_t_rate = stats(column(&PerSample::t_rate)).mean;
  out.mean_probability = stats(column(&PerSample::probability)).mean;
  out.mean_eta = stats(etas).mean;
  for (const auto& s : results) out.max_tail_mass = std::max(out.max_tail_mass, s.tail);
  return out;
}

ScenarioConfig cell_config(const ScenarioConfig& base, double r1_db, double eta_db) {
  ScenarioConfig c = base;
  c.spectrum = base.spectrum.with_leading_squeezing(squeezing_from_db(r1_db));
  if (!(eta_db >= 0.0)) throw std::invalid_argument("mean attenuation in dB must be >= 0");
  const double eta = transmissivity_from_db(eta_db);
  if (auto* fixed = std::get_if<FixedLoss>(&c.channel)) {
    fixed->eta = eta;
  } else {
    std::get<Fading>(c.channel).target_mean_eta = eta;
  }
  return c;
}

std::vector<SweepResult> sweep(const SweepGrid& grid, const ScenarioConfig& base,
                               const std::vector<OpKind>& operations, int threads) {
  if (grid.r1_db.empty() || grid.eta_db.empty()) throw std::invalid_argument("sweep grid is empty");
  if (operations.empty()) throw std::invalid_argument("sweep needs at least one operation");

  std::vector<double> r1 = grid.r1_db;
  std::vector<double> eta = grid.eta_db;
  std::sort(r1.begin(), r1.end());
  std::sort(eta.begin(), eta.end());

  const std::size_t n_ops = operations.size();
  const std::size_t n_cells = r1.size() * eta.size();
  std::vector<SweepResult> rows(n_cells * n_ops);
  parallel_for(rows.size(), threads, [&](std::size_t unit) {
    const std::size_t cell = unit / n_ops;
    const std::size_t op = unit % n_ops;
    const double r1_db = r1[cell / eta.size()];
    const double eta_db = eta[cell % eta.size()];
    ScenarioConfig c = cell_config(base, r1_db, eta_db);
    c.operation.kind = operations[op];
    // Every operation in a cell sees the same channel realizations.
    const CellResult res = monte_carlo_mean(c, cell, 1);
    rows[unit] = {r1_db, attenuation_db(res.mean_eta), res};
  });
  return rows;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double attenuation_db(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("transmissivity must lie in (0, 1]");
  return -10.0 * std::log10(eta) + 0.0;
}

double transmissivity_from_db(double db) {
  if (!(db >= 0.0)) throw std::invalid_argument("attenuation in dB must be >= 0");
  return std::pow(10.0, -db / 10.0);
}

}  // namespace ngsat
