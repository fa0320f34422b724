#pragma once

#include "omrl/cost.hpp"
#include "omrl/ilqr.hpp"
#include "omrl/regressor.hpp"
#include "omrl/systems.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace omrl {

enum class DynamicsMode { Learned, KnownDynamics };

std::string_view to_string(DynamicsMode mode);
std::optional<DynamicsMode> parse_dynamics_mode(std::string_view name);

struct LoopConfig {
  double nu_c = 10.0;   // control frequency (Hz)
  double nu_s = 100.0;  // sampling frequency (Hz)
  double noise_std = 0.01;
  double success_threshold = 0.05;
  double max_episode_time = 30.0;
  std::uint64_t seed = 0;
  /// Upper bound on the RK4 step of the ground-truth simulator; each sample
  /// period is split into equal sub-steps no longer than this.
  double max_sim_step = 0.005;

  /// Samples per control period, the integer closest to nu_s / nu_c.
  int samples_per_period() const;
  double sample_period() const { return 1.0 / nu_s; }
  double control_period() const { return samples_per_period() / nu_s; }
  int sim_substeps() const;
  double sim_step() const { return sample_period() / sim_substeps(); }
};

/// Everything run_episode needs.
struct EpisodeConfig {
  SystemParams params;
  DynamicsMode mode = DynamicsMode::Learned;
  LoopConfig loop;
  ILQRConfig ilqr;
  CostSpec cost;
  double exploration_c = 1.0;
  /// xi penalty used when the true model is supplied, large enough that the
  /// planner leaves the virtual controls at ~0.
  double known_dynamics_penalty = 1e6;
  /// Fraction of the actuator limit reached by the largest initial random control.
  double initial_control_fraction = 0.8;
  bool record_trace = false;
};

/// Published benchmark settings for one system.
EpisodeConfig default_episode_config(SystemId id);

/// One row of the optional per-control-period log.
struct TraceRow {
  double time = 0.0;
  std::size_t samples = 0;  // observations available to this plan
  Eigen::VectorXd state;
  Eigen::VectorXd tau;
  double xi_norm = 0.0;
  double planned_cost = 0.0;
  int iterations = 0;
  double reg = 0.0;
  SolveStatus status = SolveStatus::MaxIterations;
  bool fallback = false;
};

struct TrialResult {
  std::uint64_t seed = 0;
  bool success = false;
  double interaction_time = 0.0;  // simulated seconds
  double wallclock_time = 0.0;    // computation seconds
  std::size_t samples_used = 0;
  int planner_calls = 0;
  int fallback_calls = 0;
  int identification_calls = 0;
  double final_distance = 0.0;
  std::vector<TraceRow> trace;
};

/// Zero-mean Gaussian noise on q, qdot and qddot; tau is recorded exactly.
Observation observe(const SystemState& true_state, const Eigen::VectorXd& true_accel_value,
                    const Eigen::VectorXd& tau, double noise_std, std::mt19937_64& rng,
                    double time = 0.0);

/// Endpoint strictly within `threshold` of the goal endpoint.
bool success_check(const SystemParams& params, const SystemState& state, double threshold);

/// Planning dynamics qddot = model(q, qdot, s(u_real)) + xi over u = [u_real, xi].
DiscreteDynamics optimistic_planning_dynamics(const EstimatedDynamics& est,
                                              const Eigen::VectorXd& limits,
                                              const ILQRConfig& config);
/// Same construction over the double-integrator fallback.
DiscreteDynamics fallback_planning_dynamics(SystemId id, const Eigen::VectorXd& limits,
                                            const ILQRConfig& config);

/// Online loop: execute, observe, refit, plan optimistically, repeat until
/// success or the time budget runs out. Planner and model failures fall back
/// to the double integrator and never abort the episode.
TrialResult run_episode(const EpisodeConfig& config);

}  // namespace omrl
