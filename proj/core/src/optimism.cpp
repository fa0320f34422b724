#include "omrl/optimism.hpp"

#include "omrl/errors.hpp"

namespace omrl {

double penalty_weight(const ExplorationSchedule& sched) {
  if (!(sched.c > 0.0)) throw PreconditionError("exploration constant c must be positive");
  if (sched.samples == 0) throw ScheduleUninitialized("no observations collected yet");
  return static_cast<double>(sched.samples) / sched.c;
}

std::optional<Eigen::VectorXd> try_optimistic_accel(const EstimatedDynamics& est,
                                                    const Eigen::VectorXd& q,
                                                    const Eigen::VectorXd& qdot,
                                                    const Eigen::VectorXd& u,
                                                    const Eigen::VectorXd& xi) {
  if (xi.size() != config_dim(est.system)) {
    throw PreconditionError("virtual control must match the configuration dimension");
  }
  auto qddot = try_predict_accel(est, q, qdot, u);
  if (!qddot) return std::nullopt;
  *qddot += xi;
  return qddot;
}

Eigen::VectorXd optimistic_accel(const EstimatedDynamics& est, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& xi) {
  auto qddot = try_optimistic_accel(est, q, qdot, u, xi);
  if (!qddot) throw ModelUnusable("identified mass matrix is singular or ill-conditioned");
  return *std::move(qddot);
}

}  // namespace omrl
