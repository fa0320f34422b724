#include <omrl/agent.hpp>
#include <omrl/cost.hpp>
#include <omrl/ilqr.hpp>
#include <omrl/integrator.hpp>
#include <omrl/regressor.hpp>

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace omrl;

namespace {

SystemId system_arg(const benchmark::State& state) { return static_cast<SystemId>(state.range(0)); }

std::vector<Observation> rollout_observations(SystemId id, int n) {
  const SystemParams params = default_params(id);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Eigen::VectorXd limits = control_limits(id);
  SystemState s = start_state(id);
  std::vector<Observation> out;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(limits.size());
  for (int k = 0; k < n; ++k) {
    if (k % 10 == 0) {
      for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = limits(i) * unit(rng);
    }
    out.push_back(observe(s, true_accel(params, s, u), u, 0.01, rng));
    const auto f = second_order([&](const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
      return true_accel(params, SystemState{qd, q}, u);
    });
    s = SystemState::from_vector(rk4_step(f, s.to_vector(), 0.01));
  }
  return out;
}

void BM_TrueAccel(benchmark::State& state) {
  const SystemId id = system_arg(state);
  const SystemParams params = default_params(id);
  const SystemState s = start_state(id);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(actuation_dim(id), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(true_accel(params, s, u));
}

void BM_FitParams(benchmark::State& state) {
  const SystemId id = SystemId::DoublePendulum;
  const auto obs = rollout_observations(id, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_params(obs, id, 9.81));
  state.SetComplexityN(state.range(0));
}

void BM_PredictAccel(benchmark::State& state) {
  const SystemId id = system_arg(state);
  const auto est = exact_dynamics(default_params(id));
  const SystemState s = start_state(id);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(actuation_dim(id), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(predict_accel(est, s.q, s.qdot, u));
}

void BM_CostDerivatives(benchmark::State& state) {
  const SystemId id = system_arg(state);
  const CostSpec spec = default_cost_spec(default_params(id));
  const Eigen::VectorXd x = start_state(id).to_vector();
  const AugmentedControl u{Eigen::VectorXd::Constant(actuation_dim(id), 0.3),
                           Eigen::VectorXd::Constant(config_dim(id), 0.1)};
  for (auto _ : state) benchmark::DoNotOptimize(cost_derivatives(spec, 10.0, x, u));
}

void BM_ILQRSolve(benchmark::State& state) {
  const SystemId id = system_arg(state);
  const EpisodeConfig cfg = default_episode_config(id);
  const auto dyn = optimistic_planning_dynamics(exact_dynamics(cfg.params), cfg.cost.limits, cfg.ilqr);
  const auto cost = make_stage_cost(cfg.cost, 100.0);
  Eigen::VectorXd x0 = start_state(id).to_vector();
  x0.tail(config_dim(id)).array() += 0.3;
  const std::vector<Eigen::VectorXd> init(cfg.ilqr.horizon,
                                          Eigen::VectorXd::Zero(actuation_dim(id) + config_dim(id)));
  for (auto _ : state) benchmark::DoNotOptimize(solve(x0, init, dyn, cost, cfg.ilqr));
}

void BM_Episode(benchmark::State& state) {
  EpisodeConfig cfg = default_episode_config(system_arg(state));
  cfg.loop.max_episode_time = 2.0;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.loop.seed = seed++;
    benchmark::DoNotOptimize(run_episode(cfg));
  }
}

}  // namespace

BENCHMARK(BM_TrueAccel)->DenseRange(0, 2);
BENCHMARK(BM_FitParams)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);
BENCHMARK(BM_PredictAccel)->DenseRange(0, 2);
BENCHMARK(BM_CostDerivatives)->DenseRange(0, 2);
BENCHMARK(BM_ILQRSolve)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Episode)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
