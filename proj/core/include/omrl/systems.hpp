#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace omrl {

enum class SystemId { Pendulum, Cartpole, DoublePendulum };

std::string_view to_string(SystemId id);
std::optional<SystemId> parse_system_id(std::string_view name);

/// Single link swinging about a fixed joint. theta = 0 hangs down.
struct PendulumParams {
  double mass = 1.0;      // kg
  double length = 1.0;    // m
  double friction = 0.0;  // N m s
  double gravity = 9.81;  // m/s^2

  /// Inertia about the link midpoint (thin rod).
  double inertia() const { return mass * length * length / 12.0; }
};

/// Pole on a cart driven by a horizontal force. Configuration is [theta, x];
/// theta = 0 hangs down.
struct CartpoleParams {
  double cart_mass = 0.5;    // kg
  double pole_mass = 0.5;    // kg
  double pole_length = 0.5;  // m
  double friction = 0.1;     // N s/m, between cart and ground
  double gravity = 9.8;      // m/s^2
};

/// Two-link arm with torques at both joints. Angles are absolute and
/// measured from the upward vertical, so the zero configuration stands up.
struct DoublePendulumParams {
  double mass1 = 0.5;
  double mass2 = 0.5;
  double length1 = 0.5;
  double length2 = 0.5;
  double gravity = 9.81;

  double inertia1() const { return mass1 * length1 * length1 / 12.0; }
  double inertia2() const { return mass2 * length2 * length2 / 12.0; }
};

using SystemParams = std::variant<PendulumParams, CartpoleParams, DoublePendulumParams>;

SystemId system_id(const SystemParams& params);
SystemParams default_params(SystemId id);

/// Configuration dimension d.
int config_dim(SystemId id);
/// Number of actuators a.
int actuation_dim(SystemId id);
/// Index of the configuration coordinate driven by each actuator.
std::vector<int> actuated_coordinates(SystemId id);
/// Symmetric actuator limits, one per actuator.
Eigen::VectorXd control_limits(SystemId id);

/// State x = [qdot, q].
struct SystemState {
  Eigen::VectorXd qdot;
  Eigen::VectorXd q;

  Eigen::VectorXd to_vector() const;
  static SystemState from_vector(const Eigen::VectorXd& x);
  int dof() const { return static_cast<int>(q.size()); }
};

/// Rest state the swing-up starts from (hanging, zero velocity).
SystemState start_state(SystemId id);
/// Upright rest state.
SystemState goal_state(SystemId id);

/// Closed-form forward dynamics qddot = f(q, qdot, u).
/// Throws PreconditionError on dimension mismatch and NumericalError if the
/// double-pendulum mass matrix is numerically singular.
Eigen::VectorXd true_accel(const SystemParams& params, const SystemState& state,
                           const Eigen::VectorXd& u);

/// Planar position of the tip of the last link.
Eigen::Vector2d endpoint(const SystemParams& params, const Eigen::VectorXd& q);

/// d p / d q, shape 2 x d.
Eigen::MatrixXd endpoint_jacobian(const SystemParams& params, const Eigen::VectorXd& q);

/// Second derivatives of each endpoint coordinate, each d x d.
std::array<Eigen::MatrixXd, 2> endpoint_hessians(const SystemParams& params,
                                                 const Eigen::VectorXd& q);

/// Endpoint of the goal configuration.
Eigen::Vector2d goal_endpoint(const SystemParams& params);

/// Kinetic plus potential energy, ignoring friction.
double mechanical_energy(const SystemParams& params, const SystemState& state);

}  // namespace omrl
