#include "omrl/agent.hpp"

#include "omrl/errors.hpp"
#include "omrl/integrator.hpp"
#include "omrl/optimism.hpp"

#include <chrono>
#include <cmath>

namespace omrl {

std::string_view to_string(DynamicsMode mode) {
  return mode == DynamicsMode::Learned ? "learned" : "known-dynamics";
}

std::optional<DynamicsMode> parse_dynamics_mode(std::string_view name) {
  if (name == "learned") return DynamicsMode::Learned;
  if (name == "known-dynamics" || name == "known") return DynamicsMode::KnownDynamics;
  return std::nullopt;
}

int LoopConfig::samples_per_period() const {
  return std::max(1, static_cast<int>(std::lround(nu_s / nu_c)));
}

int LoopConfig::sim_substeps() const {
  return std::max(1, static_cast<int>(std::ceil(sample_period() / max_sim_step - 1e-9)));
}

EpisodeConfig default_episode_config(SystemId id) {
  EpisodeConfig cfg;
  cfg.params = default_params(id);
  cfg.cost = default_cost_spec(cfg.params);
  switch (id) {
    case SystemId::Pendulum:
      cfg.loop.nu_c = 10.0;
      cfg.loop.nu_s = 100.0;
      cfg.ilqr.horizon = 13;
      cfg.ilqr.delta = 0.1;
      cfg.exploration_c = 1.0;
      break;
    case SystemId::Cartpole:
      cfg.loop.nu_c = 16.7;
      cfg.loop.nu_s = 50.0;
      cfg.ilqr.horizon = 8;
      cfg.ilqr.delta = 0.1;
      cfg.exploration_c = 1.0;
      break;
    case SystemId::DoublePendulum:
      cfg.loop.nu_c = 16.7;
      cfg.loop.nu_s = 50.0;
      cfg.ilqr.horizon = 8;
      cfg.ilqr.delta = 0.08;
      cfg.exploration_c = 1.0;
      break;
  }
  return cfg;
}

Observation observe(const SystemState& true_state, const Eigen::VectorXd& true_accel_value,
                    const Eigen::VectorXd& tau, double noise_std, std::mt19937_64& rng,
                    double time) {
  if (!(noise_std >= 0.0)) throw PreconditionError("noise_std must be non-negative");
  Observation o{time, true_state.q, true_state.qdot, true_accel_value, tau};
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (auto* v : {&o.q, &o.qdot, &o.qddot}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) += noise(rng);
    }
  }
  return o;
}

bool success_check(const SystemParams& params, const SystemState& state, double threshold) {
  return (endpoint(params, state.q) - goal_endpoint(params)).norm() < threshold;
}

namespace {

DiscreteDynamics planning_dynamics(AccelFunction model, SystemId id, const ILQRConfig& config) {
  const int a = actuation_dim(id);
  const int d = config_dim(id);
  auto accel = [model = std::move(model), a, d](const Eigen::VectorXd& q,
                                                const Eigen::VectorXd& qdot,
                                                const Eigen::VectorXd& u)
      -> std::optional<Eigen::VectorXd> {
    auto qddot = model(q, qdot, u.head(a));
    if (!qddot) return std::nullopt;
    *qddot += u.segment(a, d);
    return qddot;
  };
  return discretize(std::move(accel), config.delta, config.fd_step);
}

}  // namespace

DiscreteDynamics optimistic_planning_dynamics(const EstimatedDynamics& est,
                                              const Eigen::VectorXd& limits,
                                              const ILQRConfig& config) {
  AccelFunction model = [est, limits](const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                                      const Eigen::VectorXd& u_raw) {
    return try_predict_accel(est, q, qdot, squash(u_raw, limits));
  };
  return planning_dynamics(std::move(model), est.system, config);
}

DiscreteDynamics fallback_planning_dynamics(SystemId id, const Eigen::VectorXd& limits,
                                            const ILQRConfig& config) {
  const int d = config_dim(id);
  AccelFunction model = [id, limits, d](const Eigen::VectorXd&, const Eigen::VectorXd&,
                                        const Eigen::VectorXd& u_raw)
      -> std::optional<Eigen::VectorXd> {
    return fallback_dynamics(id, squash(u_raw, limits), Eigen::VectorXd::Zero(d));
  };
  return planning_dynamics(std::move(model), id, config);
}

TrialResult run_episode(const EpisodeConfig& config) {
  const auto wall_start = std::chrono::steady_clock::now();
  const SystemId id = system_id(config.params);
  const int d = config_dim(id);
  const int a = actuation_dim(id);
  const LoopConfig& loop = config.loop;
  if (!(loop.nu_s >= loop.nu_c) || !(loop.nu_c > 0.0)) {
    throw PreconditionError("sampling frequency must be at least the control frequency");
  }
  if (config.ilqr.horizon < 2) throw PreconditionError("planning horizon must be at least 2");

  std::mt19937_64 rng(loop.seed);
  TrialResult result;
  result.seed = loop.seed;

  const Eigen::VectorXd limits = config.cost.limits;
  const double dt = loop.sample_period();
  const int per_period = loop.samples_per_period();
  const int substeps = loop.sim_substeps();
  const double sim_dt = loop.sim_step();
  const int warm_shift =
      std::max(1, static_cast<int>(std::lround(loop.control_period() / config.ilqr.delta)));
  // Float tick counting keeps t an exact multiple of dt.
  const auto max_ticks = static_cast<long>(std::floor(loop.max_episode_time / dt + 1e-9));

  // Random initial control, uniform in the raw range whose squashed image is
  // +-initial_control_fraction of the limits.
  const double raw_bound =
      2.0 * std::atanh(std::clamp(config.initial_control_fraction, 0.0, 0.999999));
  std::uniform_real_distribution<double> initial(-raw_bound, raw_bound);
  Eigen::VectorXd u_raw(a);
  for (int i = 0; i < a; ++i) u_raw(i) = initial(rng);
  Eigen::VectorXd tau = squash(u_raw, limits);

  std::vector<Eigen::VectorXd> warm(config.ilqr.horizon, Eigen::VectorXd::Zero(a + d));
  std::vector<Observation> observations;
  SystemState state = start_state(id);
  long tick = 0;

  const auto finish = [&](bool success) {
    result.success = success;
    result.interaction_time = static_cast<double>(tick) * dt;
    result.samples_used = observations.size();
    result.final_distance = (endpoint(config.params, state.q) - goal_endpoint(config.params)).norm();
    result.wallclock_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
  };

  if (success_check(config.params, state, loop.success_threshold)) return finish(true);

  const EstimatedDynamics known = exact_dynamics(config.params);

  while (tick < max_ticks) {
    // Execute tau for one control period with zero-order hold.
    const auto true_dynamics = second_order([&](const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
      return true_accel(config.params, SystemState{qd, q}, tau);
    });
    for (int k = 0; k < per_period && tick < max_ticks; ++k) {
      Eigen::VectorXd x = state.to_vector();
      for (int sub = 0; sub < substeps; ++sub) x = rk4_step(true_dynamics, x, sim_dt);
      state = SystemState::from_vector(x);
      ++tick;
      const Eigen::VectorXd qddot = true_accel(config.params, state, tau);
      observations.push_back(
          observe(state, qddot, tau, loop.noise_std, rng, static_cast<double>(tick) * dt));
      if (success_check(config.params, state, loop.success_threshold)) return finish(true);
    }
    if (tick >= max_ticks) break;

    const Observation& latest = observations.back();
    SystemState believed{latest.qdot, latest.q};
    const Eigen::VectorXd x0 = believed.to_vector();

    EstimatedDynamics est = known;
    if (config.mode == DynamicsMode::Learned) {
      est = fit_params(observations, id, known.gravity);
      ++result.identification_calls;
    }
    const double penalty =
        config.mode == DynamicsMode::KnownDynamics
            ? config.known_dynamics_penalty
            : penalty_weight(ExplorationSchedule{config.exploration_c, observations.size()});
    const StageCost cost = make_stage_cost(config.cost, penalty);

    TrajectorySolution plan;
    bool used_fallback = false;
    if (try_predict_accel(est, believed.q, believed.qdot, tau)) {
      plan = solve(x0, warm, optimistic_planning_dynamics(est, limits, config.ilqr), cost,
                   config.ilqr);
    } else {
      plan.status = SolveStatus::Diverged;
    }
    ++result.planner_calls;
    if (plan.status == SolveStatus::Diverged) {
      used_fallback = true;
      ++result.fallback_calls;
      plan = solve(x0, warm, fallback_planning_dynamics(id, limits, config.ilqr), cost,
                   config.ilqr);
    }

    if (plan.status != SolveStatus::Diverged && !plan.controls.empty()) {
      u_raw = plan.controls.front().head(a);
      tau = squash(u_raw, limits);
      warm = shift_controls(plan.controls, warm_shift);
    }

    if (config.record_trace) {
      TraceRow row;
      row.time = static_cast<double>(tick) * dt;
      row.samples = observations.size();
      row.state = state.to_vector();
      row.tau = tau;
      row.xi_norm = plan.controls.empty() ? 0.0 : plan.controls.front().tail(d).norm();
      row.planned_cost = plan.total_cost;
      row.iterations = plan.iterations;
      row.reg = plan.final_reg;
      row.status = plan.status;
      row.fallback = used_fallback;
      result.trace.push_back(std::move(row));
    }
  }
  return finish(false);
}

}  // namespace omrl
