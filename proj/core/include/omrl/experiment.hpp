#pragma once

#include "omrl/agent.hpp"
#include "omrl/systems.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace omrl {

struct ExperimentConfig {
  SystemId system = SystemId::Pendulum;
  DynamicsMode mode = DynamicsMode::Learned;
  int trials = 50;
  std::uint64_t base_seed = 0;
  std::string output_path;
  int parallel = 1;
  bool verbose = false;
  /// Wallclock is the only non-reproducible field of a trial record.
  bool record_wallclock = true;
  EpisodeConfig episode;
};

ExperimentConfig default_experiment(SystemId system, DynamicsMode mode = DynamicsMode::Learned);

/// A `key = value` assignment with its source line (0 for command-line input).
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Recognized configuration keys.
std::span<const std::string_view> config_keys();

/// Splits `key = value` lines; `#` starts a comment. Throws ConfigError.
std::vector<ConfigEntry> parse_config_entries(std::istream& in);

/// Resolves entries into a full configuration. The last `system` entry picks
/// the benchmark defaults, then every other entry is applied in order.
/// Throws ConfigError naming the line and the offending key.
ExperimentConfig resolve_config(const std::vector<ConfigEntry>& entries);

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Stable hex digest of every parameter that influences an episode except the seed.
std::string config_hash(const ExperimentConfig& cfg);

/// One JSON object, no trailing newline.
std::string trial_record_json(const ExperimentConfig& cfg, const TrialResult& trial);
struct TrialRecord {
  std::string system;
  std::string mode;
  std::uint64_t seed = 0;
  bool success = false;
  double interaction_time = 0.0;
  std::optional<double> wallclock_time;
  std::size_t samples = 0;
  std::string config_hash;
};
TrialRecord parse_trial_record(std::string_view json);

struct BenchmarkSummary {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  /// Interaction-time statistics over successful trials; empty with no successes.
  std::optional<double> mean_interaction_time;
  std::optional<double> std_interaction_time;
  bool single_success = false;  // std reported as 0 because n = 1
  double mean_wallclock_time = 0.0;
  double mean_episode_time = 0.0;  // over all trials, successful or not
};

/// Throws PreconditionError on an empty list.
BenchmarkSummary summarize(std::span<const TrialResult> trials);
std::string summary_json(const ExperimentConfig& cfg, const BenchmarkSummary& summary);

/// Runs seeds base_seed .. base_seed + trials - 1 on `parallel` threads.
/// Results are returned in seed order.
std::vector<TrialResult> run_trials(const ExperimentConfig& cfg);

/// run_trials plus output: per-trial JSON lines followed by one summary line.
/// The output file is opened before any trial runs (IoError if unwritable).
BenchmarkSummary run_batch(const ExperimentConfig& cfg, std::vector<TrialResult>* trials = nullptr);

/// t, x..., tau..., xi_norm, cost per control period.
void write_trace_csv(std::ostream& out, const TrialResult& trial);

}  // namespace omrl
