#pragma once

#include "omrl/cost.hpp"
#include "omrl/systems.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace omrl {

struct ILQRConfig {
  int horizon = 13;     // T, number of controls
  double delta = 0.1;   // planning timestep (s)
  int max_iters = 50;
  double reg_init = 1e-6;
  double reg_min = 1e-9;
  double reg_max = 1e6;
  double reg_factor = 10.0;
  int max_backtracks = 10;  // step scales 1, 1/2, ..., 2^-max_backtracks
  double convergence_tol = 1e-6;
  double fd_step = 1e-5;
  double divergence_norm = 1e6;
};

/// Discrete-map Jacobians, fx = d f / d x and fu = d f / d u.
struct Linearization {
  Eigen::MatrixXd fx;
  Eigen::MatrixXd fu;
};

/// x_{t+1} = f(x_t, u_t). step returns nullopt when the map is not finite.
struct DiscreteDynamics {
  std::function<std::optional<Eigen::VectorXd>(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      step;
  double fd_step = 1e-5;

  /// Central finite differences of `step`; nullopt if any probe diverges.
  std::optional<Linearization> linearize(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

/// qddot = f(q, qdot, u); nullopt marks an unusable model evaluation.
using AccelFunction = std::function<std::optional<Eigen::VectorXd>(
    const Eigen::VectorXd& q, const Eigen::VectorXd& qdot, const Eigen::VectorXd& u)>;

/// One RK4 step of duration delta over the first-order form [qddot, qdot].
DiscreteDynamics discretize(AccelFunction accel, double delta, double fd_step = 1e-5);

/// One RK4 step of duration delta over a general xdot = f(x, u).
DiscreteDynamics discretize_state(
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> xdot,
    double delta, double fd_step = 1e-5);

/// Running cost l(x_t, u_t) and its expansion.
struct StageCost {
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> value;
  std::function<CostDerivatives(const Eigen::VectorXd&, const Eigen::VectorXd&)> derivatives;
};

/// Augmented benchmark cost over u = [u_real, xi] with the given xi penalty.
StageCost make_stage_cost(CostSpec spec, double penalty);

/// V_t(x) = 1/2 x' Vxx x + x' Vx (up to a constant).
struct QuadraticValue {
  Eigen::VectorXd vx;
  Eigen::MatrixXd vxx;
};

struct BackwardPassResult {
  std::vector<Eigen::VectorXd> k;  // open-loop terms
  std::vector<Eigen::MatrixXd> K;  // feedback gains
  std::vector<QuadraticValue> value;  // t = 0..T
  double expected_linear = 0.0;     // sum k' Qu
  double expected_quadratic = 0.0;  // sum 1/2 k' Quu k
};

/// Riccati-like recurrence with Quu + reg I. Returns nullopt if the
/// regularized Quu is not positive definite at some step.
std::optional<BackwardPassResult> backward_pass(const std::vector<Linearization>& dynamics,
                                                const std::vector<CostDerivatives>& costs,
                                                double reg);

enum class SolveStatus { Converged, MaxIterations, Stalled, Diverged };
std::string_view to_string(SolveStatus status);

struct TrajectorySolution {
  std::vector<Eigen::VectorXd> states;    // x_0..x_T
  std::vector<Eigen::VectorXd> controls;  // u_0..u_{T-1}
  std::vector<Eigen::VectorXd> open_loop;
  std::vector<Eigen::MatrixXd> feedback;
  double total_cost = 0.0;
  bool diverged = false;

  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  double final_reg = 0.0;
  std::vector<double> cost_history;  // accepted total costs, starting with the initial rollout
};

/// Open-loop simulation of `controls` from x0.
TrajectorySolution rollout(const Eigen::VectorXd& x0, const std::vector<Eigen::VectorXd>& controls,
                           const DiscreteDynamics& dynamics, const StageCost& cost,
                           double divergence_norm = 1e6);

/// u_t = uhat_t + step_scale k_t + K_t (x_t - xhat_t).
TrajectorySolution forward_pass(const Eigen::VectorXd& x0, const TrajectorySolution& prev,
                                const BackwardPassResult& gains, const DiscreteDynamics& dynamics,
                                const StageCost& cost, double step_scale,
                                double divergence_norm = 1e6);

/// Iterative LQR with Levenberg-Marquardt regularization and backtracking.
/// status == Diverged signals that no finite trajectory could be produced.
TrajectorySolution solve(const Eigen::VectorXd& x0, const std::vector<Eigen::VectorXd>& u_init,
                         const DiscreteDynamics& dynamics, const StageCost& cost,
                         const ILQRConfig& config);

/// Drops the first `shift` controls and pads with the last one.
std::vector<Eigen::VectorXd> shift_controls(const std::vector<Eigen::VectorXd>& controls,
                                            int shift);

/// Double-integrator stand-in: each actuator accelerates its own coordinate,
/// unactuated coordinates get zero, then xi is added.
Eigen::VectorXd fallback_dynamics(SystemId id, const Eigen::VectorXd& tau,
                                  const Eigen::VectorXd& xi);

}  // namespace omrl
