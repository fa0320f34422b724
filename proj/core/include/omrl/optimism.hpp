#pragma once

#include "omrl/regressor.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>

namespace omrl {

/// Uncertainty proxy m = c / N. The virtual-control penalty is its reciprocal.
struct ExplorationSchedule {
  double c = 1.0;
  std::size_t samples = 0;
};

/// Returns N / c. Throws ScheduleUninitialized when N = 0 and
/// PreconditionError when c <= 0.
double penalty_weight(const ExplorationSchedule& sched);

/// Estimated dynamics plus the virtual acceleration xi.
Eigen::VectorXd optimistic_accel(const EstimatedDynamics& est, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& xi);

std::optional<Eigen::VectorXd> try_optimistic_accel(const EstimatedDynamics& est,
                                                    const Eigen::VectorXd& q,
                                                    const Eigen::VectorXd& qdot,
                                                    const Eigen::VectorXd& u,
                                                    const Eigen::VectorXd& xi);

}  // namespace omrl
