#pragma once

#include "omrl/optimism.hpp"
#include "omrl/systems.hpp"

#include <Eigen/Core>

#include <optional>

namespace omrl {

/// Raises the squashed-control penalty once the endpoint is within `radius`
/// of the target.
struct NearGoalBoost {
  double radius = 0.15;
  double squashed_weight = 0.1;
};

/// Per-timestep task cost
///   sqrt(e' Qp e + alpha) + 0.5 [x' Qv x + s(u)' R s(u) + u' P u],  e = p(x) - p*.
/// All weight matrices are diagonal and stored as vectors.
struct CostSpec {
  SystemParams geometry;            // kinematics used for p(x)
  Eigen::Vector2d endpoint_weight;  // Qp
  Eigen::VectorXd state_weight;     // Qv, length 2d, over x = [qdot, q]
  Eigen::VectorXd squashed_weight;  // R, length a
  Eigen::VectorXd raw_weight;       // P, length a
  double alpha = 0.01;
  Eigen::Vector2d target;       // p*
  Eigen::VectorXd goal_state;   // x_goal
  Eigen::VectorXd limits;       // squashing limits, length a
  std::optional<NearGoalBoost> near_goal;

  SystemId system() const { return system_id(geometry); }
};

/// Benchmark default weights for the given system.
CostSpec default_cost_spec(const SystemParams& geometry);

/// Real (pre-squash) and virtual parts of a planner control u = [tau, xi].
struct AugmentedControl {
  Eigen::VectorXd u_real;
  Eigen::VectorXd xi;

  Eigen::VectorXd joined() const;
  static AugmentedControl split(const Eigen::VectorXd& u, int actuators);
};

/// 2 c (sigma(u) - 0.5), strictly inside (-c, c).
double squash(double u_raw, double limit);
/// Elementwise squash with per-channel limits.
Eigen::VectorXd squash(const Eigen::VectorXd& u_raw, const Eigen::VectorXd& limits);
double squash_derivative(double u_raw, double limit);
double squash_second_derivative(double u_raw, double limit);

/// Whether the near-goal penalty boost is active at configuration q.
bool near_goal(const CostSpec& spec, const Eigen::VectorXd& q);

double task_cost(const CostSpec& spec, const Eigen::VectorXd& x, const AugmentedControl& u);

/// task_cost + weight * |xi|^2
double augmented_cost(const CostSpec& spec, double penalty, const Eigen::VectorXd& x,
                      const AugmentedControl& u);
double augmented_cost(const CostSpec& spec, const ExplorationSchedule& sched,
                      const Eigen::VectorXd& x, const AugmentedControl& u);

struct CostDerivatives {
  Eigen::VectorXd lx;
  Eigen::VectorXd lu;
  Eigen::MatrixXd lxx;
  Eigen::MatrixXd lux;
  Eigen::MatrixXd luu;
};

/// Exact first and second partials of augmented_cost with respect to
/// x = [qdot, q] and u = [u_real, xi].
CostDerivatives cost_derivatives(const CostSpec& spec, double penalty, const Eigen::VectorXd& x,
                                 const AugmentedControl& u);
CostDerivatives cost_derivatives(const CostSpec& spec, const ExplorationSchedule& sched,
                                 const Eigen::VectorXd& x, const AugmentedControl& u);

}  // namespace omrl
