#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>

namespace omrl {

/// Continuous dynamics x -> xdot (control held fixed by the caller).
using StateDerivative = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Classical fourth-order Runge-Kutta step. Returns nullopt if any stage is
/// non-finite.
std::optional<Eigen::VectorXd> try_rk4_step(const StateDerivative& f, const Eigen::VectorXd& x,
                                            double dt);

/// Same as try_rk4_step but throws IntegrationDiverged on a non-finite stage
/// and PreconditionError for dt <= 0.
Eigen::VectorXd rk4_step(const StateDerivative& f, const Eigen::VectorXd& x, double dt);

/// Builds the first-order form [qddot, qdot] from an acceleration function on
/// x = [qdot, q].
StateDerivative second_order(
    std::function<Eigen::VectorXd(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot)> accel);

}  // namespace omrl
