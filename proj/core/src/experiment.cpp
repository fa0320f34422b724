#include "omrl/experiment.hpp"

#include "omrl/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

namespace omrl {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 30> kKeys = {
    "system",           "mode",          "trials",        "seed",
    "output",           "parallel",      "verbose",       "record-wallclock",
    "exploration-c",    "noise-std",     "control-frequency", "sampling-frequency",
    "success-threshold", "max-episode-time", "horizon",   "delta",
    "max-iters",        "convergence-tol", "reg-init",     "fd-step",
    "alpha",            "endpoint-weight", "state-weight", "squashed-weight",
    "raw-weight",       "near-goal-radius", "near-goal-weight", "known-penalty",
    "initial-control-fraction", "record-trace",
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const ConfigEntry& e) {
  const std::string v = trim(e.value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("key '" + e.key + "' expects a number, got '" + e.value + "'", e.line);
  }
  return out;
}

double to_positive(const ConfigEntry& e) {
  const double v = to_double(e);
  if (!(v > 0.0)) throw ConfigError("key '" + e.key + "' must be positive", e.line);
  return v;
}

long long to_integer(const ConfigEntry& e, long long min_value) {
  const std::string v = trim(e.value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + e.key + "' expects an integer, got '" + e.value + "'", e.line);
  }
  if (out < min_value) {
    throw ConfigError("key '" + e.key + "' must be at least " + std::to_string(min_value), e.line);
  }
  return out;
}

bool to_bool(const ConfigEntry& e) {
  const std::string v = trim(e.value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + e.key + "' expects true/false, got '" + e.value + "'", e.line);
}

Eigen::VectorXd to_vector(const ConfigEntry& e, Eigen::Index expected) {
  std::string v = e.value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<double> values;
  std::string token;
  while (in >> token) values.push_back(to_double(ConfigEntry{e.key, token, e.line}));
  if (static_cast<Eigen::Index>(values.size()) != expected) {
    throw ConfigError("key '" + e.key + "' expects " + std::to_string(expected) + " values",
                      e.line);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), expected);
}

void apply_entry(ExperimentConfig& cfg, const ConfigEntry& e) {
  EpisodeConfig& ep = cfg.episode;
  const SystemId id = cfg.system;
  const std::string& k = e.key;
  if (k == "system") {
    return;  // consumed up front
  } else if (k == "mode") {
    auto mode = parse_dynamics_mode(trim(e.value));
    if (!mode) throw ConfigError("unknown mode '" + e.value + "'", e.line);
    cfg.mode = *mode;
    ep.mode = *mode;
  } else if (k == "trials") {
    cfg.trials = static_cast<int>(to_integer(e, 1));
  } else if (k == "seed") {
    cfg.base_seed = static_cast<std::uint64_t>(to_integer(e, 0));
  } else if (k == "output") {
    cfg.output_path = trim(e.value);
  } else if (k == "parallel") {
    cfg.parallel = static_cast<int>(to_integer(e, 1));
  } else if (k == "verbose") {
    cfg.verbose = to_bool(e);
  } else if (k == "record-wallclock") {
    cfg.record_wallclock = to_bool(e);
  } else if (k == "exploration-c") {
    ep.exploration_c = to_positive(e);
  } else if (k == "noise-std") {
    ep.loop.noise_std = to_double(e);
    if (ep.loop.noise_std < 0.0) throw ConfigError("noise-std must be non-negative", e.line);
  } else if (k == "control-frequency") {
    ep.loop.nu_c = to_positive(e);
  } else if (k == "sampling-frequency") {
    ep.loop.nu_s = to_positive(e);
  } else if (k == "success-threshold") {
    ep.loop.success_threshold = to_positive(e);
  } else if (k == "max-episode-time") {
    ep.loop.max_episode_time = to_double(e);
    if (ep.loop.max_episode_time < 0.0) {
      throw ConfigError("max-episode-time must be non-negative", e.line);
    }
  } else if (k == "horizon") {
    ep.ilqr.horizon = static_cast<int>(to_integer(e, 2));
  } else if (k == "delta") {
    ep.ilqr.delta = to_positive(e);
  } else if (k == "max-iters") {
    ep.ilqr.max_iters = static_cast<int>(to_integer(e, 1));
  } else if (k == "convergence-tol") {
    ep.ilqr.convergence_tol = to_positive(e);
  } else if (k == "reg-init") {
    ep.ilqr.reg_init = to_positive(e);
  } else if (k == "fd-step") {
    ep.ilqr.fd_step = to_positive(e);
  } else if (k == "alpha") {
    ep.cost.alpha = to_positive(e);
  } else if (k == "endpoint-weight") {
    ep.cost.endpoint_weight = to_vector(e, 2);
  } else if (k == "state-weight") {
    ep.cost.state_weight = to_vector(e, 2 * config_dim(id));
  } else if (k == "squashed-weight") {
    ep.cost.squashed_weight = to_vector(e, actuation_dim(id));
  } else if (k == "raw-weight") {
    ep.cost.raw_weight = to_vector(e, actuation_dim(id));
  } else if (k == "near-goal-radius") {
    if (!ep.cost.near_goal) ep.cost.near_goal = NearGoalBoost{};
    ep.cost.near_goal->radius = to_positive(e);
  } else if (k == "near-goal-weight") {
    if (!ep.cost.near_goal) ep.cost.near_goal = NearGoalBoost{};
    ep.cost.near_goal->squashed_weight = to_double(e);
  } else if (k == "known-penalty") {
    ep.known_dynamics_penalty = to_positive(e);
  } else if (k == "initial-control-fraction") {
    ep.initial_control_fraction = to_double(e);
    if (!(ep.initial_control_fraction >= 0.0 && ep.initial_control_fraction < 1.0)) {
      throw ConfigError("initial-control-fraction must lie in [0, 1)", e.line);
    }
  } else if (k == "record-trace") {
    ep.record_trace = to_bool(e);
  } else {
    throw ConfigError("unknown key '" + k + "'", e.line);
  }
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json episode_json(const ExperimentConfig& cfg) {
  const EpisodeConfig& ep = cfg.episode;
  json j;
  j["system"] = std::string(to_string(cfg.system));
  j["mode"] = std::string(to_string(cfg.mode));
  j["nu_c"] = ep.loop.nu_c;
  j["nu_s"] = ep.loop.nu_s;
  j["noise_std"] = ep.loop.noise_std;
  j["success_threshold"] = ep.loop.success_threshold;
  j["max_episode_time"] = ep.loop.max_episode_time;
  j["horizon"] = ep.ilqr.horizon;
  j["delta"] = ep.ilqr.delta;
  j["max_iters"] = ep.ilqr.max_iters;
  j["convergence_tol"] = ep.ilqr.convergence_tol;
  j["reg"] = {ep.ilqr.reg_init, ep.ilqr.reg_min, ep.ilqr.reg_max, ep.ilqr.reg_factor};
  j["max_backtracks"] = ep.ilqr.max_backtracks;
  j["fd_step"] = ep.ilqr.fd_step;
  j["alpha"] = ep.cost.alpha;
  j["endpoint_weight"] = vec_json(ep.cost.endpoint_weight);
  j["state_weight"] = vec_json(ep.cost.state_weight);
  j["squashed_weight"] = vec_json(ep.cost.squashed_weight);
  j["raw_weight"] = vec_json(ep.cost.raw_weight);
  if (ep.cost.near_goal) {
    j["near_goal"] = {ep.cost.near_goal->radius, ep.cost.near_goal->squashed_weight};
  }
  j["exploration_c"] = ep.exploration_c;
  j["known_penalty"] = ep.known_dynamics_penalty;
  j["initial_control_fraction"] = ep.initial_control_fraction;
  return j;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

ExperimentConfig default_experiment(SystemId system, DynamicsMode mode) {
  ExperimentConfig cfg;
  cfg.system = system;
  cfg.mode = mode;
  cfg.episode = default_episode_config(system);
  cfg.episode.mode = mode;
  return cfg;
}

std::span<const std::string_view> config_keys() { return kKeys; }

std::vector<ConfigEntry> parse_config_entries(std::istream& in) {
  std::vector<ConfigEntry> entries;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(std::string_view(raw).substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    ConfigEntry e{trim(std::string_view(text).substr(0, eq)),
                  trim(std::string_view(text).substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError("missing key before '='", line);
    if (e.value.empty()) throw ConfigError("missing value for key '" + e.key + "'", line);
    entries.push_back(std::move(e));
  }
  return entries;
}

ExperimentConfig resolve_config(const std::vector<ConfigEntry>& entries) {
  for (const auto& e : entries) {
    if (std::find(kKeys.begin(), kKeys.end(), e.key) == kKeys.end()) {
      throw ConfigError("unknown key '" + e.key + "'", e.line);
    }
  }
  SystemId system = SystemId::Pendulum;
  for (const auto& e : entries) {
    if (e.key != "system") continue;
    auto id = parse_system_id(trim(e.value));
    if (!id) throw ConfigError("unknown system '" + e.value + "'", e.line);
    system = *id;
  }
  ExperimentConfig cfg = default_experiment(system);
  for (const auto& e : entries) apply_entry(cfg, e);
  if (cfg.episode.loop.nu_s < cfg.episode.loop.nu_c) {
    throw ConfigError("sampling-frequency must be at least control-frequency");
  }
  return cfg;
}

ExperimentConfig parse_config(std::istream& in) { return resolve_config(parse_config_entries(in)); }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a(episode_json(cfg).dump());
  return out.str();
}

std::string trial_record_json(const ExperimentConfig& cfg, const TrialResult& trial) {
  json j;
  j["system"] = std::string(to_string(cfg.system));
  j["mode"] = std::string(to_string(cfg.mode));
  j["seed"] = trial.seed;
  j["success"] = trial.success;
  j["interaction_time"] = trial.interaction_time;
  if (cfg.record_wallclock) j["wallclock_time"] = trial.wallclock_time;
  j["samples"] = trial.samples_used;
  j["config_hash"] = config_hash(cfg);
  return j.dump();
}

TrialRecord parse_trial_record(std::string_view text) {
  const json j = json::parse(text);
  TrialRecord r;
  r.system = j.at("system").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.success = j.at("success").get<bool>();
  r.interaction_time = j.at("interaction_time").get<double>();
  if (j.contains("wallclock_time")) r.wallclock_time = j.at("wallclock_time").get<double>();
  r.samples = j.at("samples").get<std::size_t>();
  r.config_hash = j.at("config_hash").get<std::string>();
  return r;
}

BenchmarkSummary summarize(std::span<const TrialResult> trials) {
  if (trials.empty()) throw PreconditionError("summarize needs at least one trial");
  BenchmarkSummary s;
  s.trials = trials.size();
  std::vector<double> times;
  double wall = 0.0;
  double episode = 0.0;
  for (const auto& t : trials) {
    wall += t.wallclock_time;
    episode += t.interaction_time;
    if (t.success) times.push_back(t.interaction_time);
  }
  s.successes = times.size();
  s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
  s.mean_wallclock_time = wall / static_cast<double>(s.trials);
  s.mean_episode_time = episode / static_cast<double>(s.trials);
  if (!times.empty()) {
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(times.size());
    double ss = 0.0;
    for (double t : times) ss += (t - mean) * (t - mean);
    s.mean_interaction_time = mean;
    s.single_success = times.size() == 1;
    s.std_interaction_time =
        times.size() > 1 ? std::sqrt(ss / static_cast<double>(times.size() - 1)) : 0.0;
  }
  return s;
}

std::string summary_json(const ExperimentConfig& cfg, const BenchmarkSummary& s) {
  json j;
  j["type"] = "summary";
  j["system"] = std::string(to_string(cfg.system));
  j["mode"] = std::string(to_string(cfg.mode));
  j["trials"] = s.trials;
  j["successes"] = s.successes;
  j["success_rate"] = s.success_rate;
  j["mean_interaction_time"] =
      s.mean_interaction_time ? json(*s.mean_interaction_time) : json(nullptr);
  j["std_interaction_time"] = s.std_interaction_time ? json(*s.std_interaction_time) : json(nullptr);
  j["single_success"] = s.single_success;
  if (cfg.record_wallclock) j["mean_wallclock_time"] = s.mean_wallclock_time;
  j["mean_episode_time"] = s.mean_episode_time;
  j["config_hash"] = config_hash(cfg);
  return j.dump();
}

std::vector<TrialResult> run_trials(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw PreconditionError("trials must be at least 1");
  std::vector<TrialResult> results(static_cast<std::size_t>(cfg.trials));
  const auto run_one = [&](std::size_t i) {
    EpisodeConfig ep = cfg.episode;
    ep.mode = cfg.mode;
    ep.loop.seed = cfg.base_seed + i;
    results[i] = run_episode(ep);
  };
  const int workers = std::clamp(cfg.parallel, 1, cfg.trials);
  if (workers == 1) {
    for (std::size_t i = 0; i < results.size(); ++i) run_one(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < results.size(); i = next++) run_one(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

BenchmarkSummary run_batch(const ExperimentConfig& cfg, std::vector<TrialResult>* trials) {
  std::ofstream out;
  if (!cfg.output_path.empty()) {
    out.open(cfg.output_path);
    if (!out) throw IoError("cannot open output file '" + cfg.output_path + "'");
  }
  std::vector<TrialResult> results = run_trials(cfg);
  const BenchmarkSummary summary = summarize(results);
  if (out.is_open()) {
    for (const auto& r : results) out << trial_record_json(cfg, r) << '\n';
    out << summary_json(cfg, summary) << '\n';
    if (!out) throw IoError("failed writing output file '" + cfg.output_path + "'");
  }
  if (trials) *trials = std::move(results);
  return summary;
}

void write_trace_csv(std::ostream& out, const TrialResult& trial) {
  if (trial.trace.empty()) {
    out << "t\n";
    return;
  }
  const auto n = trial.trace.front().state.size();
  const auto a = trial.trace.front().tau.size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i;
  for (Eigen::Index i = 0; i < a; ++i) out << ",tau" << i;
  out << ",xi_norm,cost,iterations,reg,status,fallback\n";
  out << std::setprecision(10);
  for (const auto& row : trial.trace) {
    out << row.time;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << row.state(i);
    for (Eigen::Index i = 0; i < a; ++i) out << ',' << row.tau(i);
    out << ',' << row.xi_norm << ',' << row.planned_cost << ',' << row.iterations << ','
        << row.reg << ',' << to_string(row.status) << ',' << (row.fallback ? 1 : 0) << '\n';
  }
}

}  // namespace omrl
