#include "omrl/validation.hpp"

#include "omrl/agent.hpp"
#include "omrl/ilqr.hpp"
#include "omrl/integrator.hpp"
#include "omrl/regressor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace omrl {

namespace {

SystemParams frictionless(SystemId id) {
  SystemParams params = default_params(id);
  if (auto* p = std::get_if<PendulumParams>(&params)) p->friction = 0.0;
  if (auto* p = std::get_if<CartpoleParams>(&params)) p->friction = 0.0;
  return params;
}

}  // namespace

CheckResult check_regressor_identity(SystemId id, int samples, std::uint64_t seed) {
  const SystemParams params = default_params(id);
  const Eigen::VectorXd delta = true_param_vector(params);
  const EstimatedDynamics exact = exact_dynamics(params);
  const int d = config_dim(id);
  const int a = actuation_dim(id);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> rate(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Eigen::VectorXd limits = control_limits(id);

  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    SystemState s{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    for (int j = 0; j < d; ++j) {
      s.q(j) = angle(rng);
      s.qdot(j) = rate(rng);
    }
    Eigen::VectorXd u(a);
    for (int j = 0; j < a; ++j) u(j) = limits(j) * unit(rng);
    const Eigen::VectorXd qddot = true_accel(params, s, u);
    const Eigen::VectorXd lhs = regressor(id, s.q, s.qdot, qddot) * delta;
    worst = std::max(worst, (lhs - rhs_vector(id, s.q, u, exact.gravity)).cwiseAbs().maxCoeff());
  }
  return CheckResult{"regressor identity (" + std::string(to_string(id)) + ")", worst, 1e-8,
                     worst <= 1e-8};
}

CheckResult check_energy_drift(SystemId id, double dt, double duration) {
  const SystemParams params = frictionless(id);
  const int d = config_dim(id);
  SystemState state{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  state.q(0) = 2.0;
  state.qdot(0) = 1.0;
  if (d == 2) {
    state.q(1) = id == SystemId::Cartpole ? 0.0 : 1.0;
    state.qdot(1) = -0.5;
  }
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(actuation_dim(id));
  const auto f = second_order([&](const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
    return true_accel(params, SystemState{qd, q}, u);
  });
  const double e0 = mechanical_energy(params, state);
  Eigen::VectorXd x = state.to_vector();
  double worst = 0.0;
  const auto steps = static_cast<long>(std::lround(duration / dt));
  for (long i = 0; i < steps; ++i) {
    x = rk4_step(f, x, dt);
    const double e = mechanical_energy(params, SystemState::from_vector(x));
    worst = std::max(worst, std::abs(e - e0) / std::abs(e0));
  }
  return CheckResult{"energy drift (" + std::string(to_string(id)) + ")", worst, 1e-4,
                     worst < 1e-4};
}

CheckResult check_lqr_exactness(int horizon) {
  const double dt = 0.1;
  Eigen::Matrix2d A;
  A << 1.0, 0.0, dt, 1.0;  // x = [v, p]
  Eigen::Vector2d B(dt, 0.5 * dt * dt);
  const Eigen::Matrix2d Q = Eigen::Vector2d(0.1, 1.0).asDiagonal();
  const double R = 0.01;

  // Finite-horizon Riccati recursion with zero terminal weight.
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
  for (int t = 0; t < horizon; ++t) {
    const double s = R + B.dot(P * B);
    const Eigen::RowVector2d K = (B.transpose() * P * A) / s;
    P = Q + A.transpose() * P * A - A.transpose() * P * B * K;
  }
  const Eigen::Vector2d x0(0.0, 1.0);
  const double optimum = 0.5 * x0.dot(P * x0);

  DiscreteDynamics dyn;
  dyn.step = [A, B](const Eigen::VectorXd& x, const Eigen::VectorXd& u)
      -> std::optional<Eigen::VectorXd> { return Eigen::VectorXd(A * x + B * u(0)); };
  StageCost cost;
  cost.value = [Q, R](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return 0.5 * x.dot(Q * x) + 0.5 * R * u(0) * u(0);
  };
  cost.derivatives = [Q, R](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return CostDerivatives{Q * x, Eigen::VectorXd::Constant(1, R * u(0)), Q,
                           Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Constant(1, 1, R)};
  };
  ILQRConfig cfg;
  cfg.horizon = horizon;
  cfg.convergence_tol = 1e-12;
  const auto sol = solve(x0, std::vector<Eigen::VectorXd>(horizon, Eigen::VectorXd::Zero(1)), dyn,
                         cost, cfg);
  const double err = std::abs(sol.total_cost - optimum);
  return CheckResult{"LQR exactness", err, 1e-8, err <= 1e-8};
}

std::vector<CheckResult> run_validation_suite() {
  std::vector<CheckResult> out;
  for (SystemId id : {SystemId::Pendulum, SystemId::Cartpole, SystemId::DoublePendulum}) {
    out.push_back(check_regressor_identity(id));
  }
  for (SystemId id : {SystemId::Pendulum, SystemId::Cartpole, SystemId::DoublePendulum}) {
    out.push_back(check_energy_drift(id, default_episode_config(id).loop.sim_step()));
  }
  out.push_back(check_lqr_exactness());
  return out;
}

}  // namespace omrl
