#include "omrl/cost.hpp"

#include "omrl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace omrl {

namespace {

double logistic(double u) {
  // Split by sign so exp never overflows.
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

Eigen::VectorXd effective_squashed_weight(const CostSpec& spec, const Eigen::VectorXd& q) {
  if (near_goal(spec, q)) {
    return Eigen::VectorXd::Constant(spec.squashed_weight.size(), spec.near_goal->squashed_weight);
  }
  return spec.squashed_weight;
}

void check_dims(const CostSpec& spec, const Eigen::VectorXd& x, const AugmentedControl& u) {
  const SystemId id = spec.system();
  const int d = config_dim(id);
  const int a = actuation_dim(id);
  if (x.size() != 2 * d || u.u_real.size() != a || u.xi.size() != d) {
    throw PreconditionError("cost evaluated with mismatched dimensions");
  }
}

}  // namespace

CostSpec default_cost_spec(const SystemParams& geometry) {
  const SystemId id = system_id(geometry);
  const int a = actuation_dim(id);
  CostSpec spec{geometry,
                Eigen::Vector2d::Zero(),
                Eigen::VectorXd(),
                Eigen::VectorXd::Constant(a, 0.01),
                Eigen::VectorXd::Constant(a, 0.01),
                0.01,
                goal_endpoint(geometry),
                goal_state(id).to_vector(),
                control_limits(id),
                std::nullopt};
  switch (id) {
    case SystemId::Pendulum:
      spec.alpha = 0.01;
      spec.endpoint_weight << 2.0, 2.0;
      spec.state_weight = Eigen::Vector2d(0.005, 0.0);
      break;
    case SystemId::Cartpole:
      spec.alpha = 0.1;
      spec.endpoint_weight << 1.0, 20.0;
      spec.state_weight = Eigen::Vector4d(0.07, 0.03, 0.0, 3.0);
      break;
    case SystemId::DoublePendulum:
      spec.alpha = 0.05;
      spec.endpoint_weight << 5.0, 5.0;
      spec.state_weight = Eigen::Vector4d(0.04, 0.04, 0.0, 0.0);
      spec.near_goal = NearGoalBoost{};
      break;
  }
  return spec;
}

Eigen::VectorXd AugmentedControl::joined() const {
  Eigen::VectorXd u(u_real.size() + xi.size());
  u << u_real, xi;
  return u;
}

AugmentedControl AugmentedControl::split(const Eigen::VectorXd& u, int actuators) {
  return AugmentedControl{u.head(actuators), u.tail(u.size() - actuators)};
}

double squash(double u_raw, double limit) {
  if (!(limit > 0.0)) throw PreconditionError("squash limit must be positive");
  // 2c(sigma(u) - 1/2) = c tanh(u/2); tanh keeps full precision near zero.
  const double inner = std::nextafter(limit, 0.0);
  return std::clamp(limit * std::tanh(0.5 * u_raw), -inner, inner);
}

Eigen::VectorXd squash(const Eigen::VectorXd& u_raw, const Eigen::VectorXd& limits) {
  Eigen::VectorXd out(u_raw.size());
  for (Eigen::Index i = 0; i < u_raw.size(); ++i) out(i) = squash(u_raw(i), limits(i));
  return out;
}

double squash_derivative(double u_raw, double limit) {
  const double s = logistic(u_raw);
  return 2.0 * limit * s * (1.0 - s);
}

double squash_second_derivative(double u_raw, double limit) {
  const double s = logistic(u_raw);
  return 2.0 * limit * s * (1.0 - s) * (1.0 - 2.0 * s);
}

bool near_goal(const CostSpec& spec, const Eigen::VectorXd& q) {
  if (!spec.near_goal) return false;
  return (endpoint(spec.geometry, q) - spec.target).norm() < spec.near_goal->radius;
}

double task_cost(const CostSpec& spec, const Eigen::VectorXd& x, const AugmentedControl& u) {
  check_dims(spec, x, u);
  const Eigen::Index d = x.size() / 2;
  const Eigen::VectorXd q = x.tail(d);
  const Eigen::Vector2d e = endpoint(spec.geometry, q) - spec.target;
  const double huber = std::sqrt(e.dot(spec.endpoint_weight.cwiseProduct(e)) + spec.alpha);
  const Eigen::VectorXd s = squash(u.u_real, spec.limits);
  const Eigen::VectorXd r = effective_squashed_weight(spec, q);
  return huber + 0.5 * (x.dot(spec.state_weight.cwiseProduct(x)) + s.dot(r.cwiseProduct(s)) +
                        u.u_real.dot(spec.raw_weight.cwiseProduct(u.u_real)));
}

double augmented_cost(const CostSpec& spec, double penalty, const Eigen::VectorXd& x,
                      const AugmentedControl& u) {
  return task_cost(spec, x, u) + penalty * u.xi.squaredNorm();
}

double augmented_cost(const CostSpec& spec, const ExplorationSchedule& sched,
                      const Eigen::VectorXd& x, const AugmentedControl& u) {
  return augmented_cost(spec, penalty_weight(sched), x, u);
}

CostDerivatives cost_derivatives(const CostSpec& spec, double penalty, const Eigen::VectorXd& x,
                                 const AugmentedControl& u) {
  check_dims(spec, x, u);
  const Eigen::Index n = x.size();
  const Eigen::Index d = n / 2;
  const Eigen::Index a = u.u_real.size();
  const Eigen::Index m = a + d;
  const Eigen::VectorXd q = x.tail(d);

  CostDerivatives out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(m),
                      Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(m, n),
                      Eigen::MatrixXd::Zero(m, m)};

  // Huber-like endpoint term h = sqrt(e' Qp e + alpha).
  const Eigen::Vector2d e = endpoint(spec.geometry, q) - spec.target;
  const Eigen::Vector2d we = spec.endpoint_weight.cwiseProduct(e);
  const double h = std::sqrt(e.dot(we) + spec.alpha);
  const Eigen::MatrixXd jac = endpoint_jacobian(spec.geometry, q);
  const auto hess = endpoint_hessians(spec.geometry, q);
  const Eigen::VectorXd grad_inner = jac.transpose() * we;  // half the gradient of e' Qp e
  Eigen::MatrixXd hess_inner = jac.transpose() * spec.endpoint_weight.asDiagonal() * jac;
  hess_inner += we(0) * hess[0] + we(1) * hess[1];
  out.lx.tail(d) = grad_inner / h;
  out.lxx.bottomRightCorner(d, d) = hess_inner / h - grad_inner * grad_inner.transpose() / (h * h * h);

  out.lx += spec.state_weight.cwiseProduct(x);
  out.lxx.diagonal() += spec.state_weight;

  const Eigen::VectorXd r = effective_squashed_weight(spec, q);
  for (Eigen::Index i = 0; i < a; ++i) {
    const double ui = u.u_real(i);
    const double c = spec.limits(i);
    const double s = squash(ui, c);
    const double ds = squash_derivative(ui, c);
    const double dds = squash_second_derivative(ui, c);
    out.lu(i) = r(i) * s * ds + spec.raw_weight(i) * ui;
    out.luu(i, i) = r(i) * (ds * ds + s * dds) + spec.raw_weight(i);
  }
  out.lu.tail(d) = 2.0 * penalty * u.xi;
  out.luu.bottomRightCorner(d, d).diagonal().setConstant(2.0 * penalty);
  return out;
}

CostDerivatives cost_derivatives(const CostSpec& spec, const ExplorationSchedule& sched,
                                 const Eigen::VectorXd& x, const AugmentedControl& u) {
  return cost_derivatives(spec, penalty_weight(sched), x, u);
}

}  // namespace omrl
