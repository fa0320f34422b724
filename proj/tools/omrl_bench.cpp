// omrl_bench: batch runner, single-episode simulator and self-check suite for
// the optimistic model-based RL benchmarks.

#include <omrl/agent.hpp>
#include <omrl/errors.hpp>
#include <omrl/experiment.hpp>
#include <omrl/validation.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
  std::optional<std::string> system;
  std::optional<std::string> mode;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::optional<std::string> output;
  std::optional<int> parallel;
  std::vector<std::string> sets;
  bool verbose = false;
};

void add_common(CLI::App* app, CommonOptions& o, bool batch) {
  app->add_option("--system", o.system, "pendulum | cartpole | double-pendulum");
  app->add_option("--mode", o.mode, "learned | known-dynamics");
  app->add_option("--seed", o.seed, "Base RNG seed");
  app->add_option("--config", o.config, "Key-value configuration file")->check(CLI::ExistingFile);
  app->add_option("--output", o.output, batch ? "JSON-lines output path" : "CSV trace path");
  app->add_option("--set", o.sets, "Extra key=value override (repeatable)");
  app->add_flag("--verbose", o.verbose, "Print per-step planner telemetry");
  if (batch) {
    app->add_option("--trials", o.trials, "Number of seeded trials")->check(CLI::PositiveNumber);
    app->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);
  }
}

omrl::ExperimentConfig build_config(const CommonOptions& o) {
  std::vector<omrl::ConfigEntry> entries;
  if (o.config) {
    std::ifstream in(*o.config);
    if (!in) throw omrl::ConfigError("cannot open config file '" + *o.config + "'");
    entries = omrl::parse_config_entries(in);
  }
  const auto push = [&](const std::string& key, const std::string& value) {
    entries.push_back(omrl::ConfigEntry{key, value, 0});
  };
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw omrl::ConfigError("--set expects key=value, got '" + s + "'");
    push(s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.system) push("system", *o.system);
  if (o.mode) push("mode", *o.mode);
  if (o.trials) push("trials", std::to_string(*o.trials));
  if (o.seed) push("seed", std::to_string(*o.seed));
  if (o.output) push("output", *o.output);
  if (o.parallel) push("parallel", std::to_string(*o.parallel));
  if (o.verbose) push("verbose", "true");
  return omrl::resolve_config(entries);
}

void print_summary(const omrl::ExperimentConfig& cfg, const omrl::BenchmarkSummary& s) {
  std::printf("%s / %s: %zu/%zu successful (%.0f%%)\n", std::string(omrl::to_string(cfg.system)).c_str(),
              std::string(omrl::to_string(cfg.mode)).c_str(), s.successes, s.trials,
              100.0 * s.success_rate);
  if (s.mean_interaction_time) {
    std::printf("  interaction time %.2f +- %.2f s\n", *s.mean_interaction_time,
                *s.std_interaction_time);
  }
  std::printf("  mean wallclock   %.3f s (mean episode %.2f s)\n", s.mean_wallclock_time,
              s.mean_episode_time);
}

int run_command(const CommonOptions& o) {
  const omrl::ExperimentConfig cfg = build_config(o);
  std::vector<omrl::TrialResult> trials;
  const auto summary = omrl::run_batch(cfg, &trials);
  if (cfg.verbose) {
    for (const auto& t : trials) std::cout << omrl::trial_record_json(cfg, t) << '\n';
  }
  print_summary(cfg, summary);
  return 0;
}

int simulate_command(const CommonOptions& o) {
  omrl::ExperimentConfig cfg = build_config(o);
  omrl::EpisodeConfig ep = cfg.episode;
  ep.mode = cfg.mode;
  ep.loop.seed = cfg.base_seed;
  ep.record_trace = true;
  const omrl::TrialResult trial = omrl::run_episode(ep);
  if (cfg.verbose) {
    for (const auto& row : trial.trace) {
      std::printf("t=%6.2f iters=%2d cost=%9.4f reg=%.1e |xi|=%.3f %s%s\n", row.time,
                  row.iterations, row.planned_cost, row.reg, row.xi_norm,
                  std::string(omrl::to_string(row.status)).c_str(), row.fallback ? " fallback" : "");
    }
  }
  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path);
    if (!out) throw omrl::IoError("cannot open trace file '" + cfg.output_path + "'");
    omrl::write_trace_csv(out, trial);
  }
  std::cout << omrl::trial_record_json(cfg, trial) << '\n';
  return 0;
}

int validate_command() {
  bool ok = true;
  for (const auto& c : omrl::run_validation_suite()) {
    std::printf("[%s] %-34s %.3e (limit %.1e)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.value, c.threshold);
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimistic model-based RL benchmark harness"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  CommonOptions sim_opts;
  auto* run = app.add_subcommand("run", "Run a seeded batch of trials");
  add_common(run, run_opts, true);
  auto* simulate = app.add_subcommand("simulate", "Run one episode with a per-step trace");
  add_common(simulate, sim_opts, false);
  auto* validate = app.add_subcommand("validate", "Run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_opts);
    if (simulate->parsed()) return simulate_command(sim_opts);
    if (validate->parsed()) return validate_command();
  } catch (const omrl::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const omrl::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
