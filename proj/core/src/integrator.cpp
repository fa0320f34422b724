#include "omrl/integrator.hpp"

#include "omrl/errors.hpp"

namespace omrl {

std::optional<Eigen::VectorXd> try_rk4_step(const StateDerivative& f, const Eigen::VectorXd& x,
                                            double dt) {
  const Eigen::VectorXd k1 = f(x);
  if (!k1.allFinite()) return std::nullopt;
  const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1);
  if (!k2.allFinite()) return std::nullopt;
  const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2);
  if (!k3.allFinite()) return std::nullopt;
  const Eigen::VectorXd k4 = f(x + dt * k3);
  if (!k4.allFinite()) return std::nullopt;
  Eigen::VectorXd next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) return std::nullopt;
  return next;
}

Eigen::VectorXd rk4_step(const StateDerivative& f, const Eigen::VectorXd& x, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("rk4_step requires dt > 0");
  auto next = try_rk4_step(f, x, dt);
  if (!next) throw IntegrationDiverged("non-finite Runge-Kutta stage");
  return *std::move(next);
}

StateDerivative second_order(
    std::function<Eigen::VectorXd(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot)> accel) {
  return [accel = std::move(accel)](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::Index d = x.size() / 2;
    Eigen::VectorXd xdot(x.size());
    xdot.head(d) = accel(x.tail(d), x.head(d));
    xdot.tail(d) = x.head(d);
    return xdot;
  };
}

}  // namespace omrl
