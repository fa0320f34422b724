#include "omrl/systems.hpp"

#include "omrl/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

namespace omrl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dims(SystemId id, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                const Eigen::VectorXd& u) {
  const int d = config_dim(id);
  if (q.size() != d || qdot.size() != d) {
    throw PreconditionError("state dimension does not match " + std::string(to_string(id)));
  }
  if (u.size() != actuation_dim(id)) {
    throw PreconditionError("control dimension does not match " + std::string(to_string(id)));
  }
}

}  // namespace

std::string_view to_string(SystemId id) {
  switch (id) {
    case SystemId::Pendulum:
      return "pendulum";
    case SystemId::Cartpole:
      return "cartpole";
    case SystemId::DoublePendulum:
      return "double-pendulum";
  }
  return "unknown";
}

std::optional<SystemId> parse_system_id(std::string_view name) {
  if (name == "pendulum") return SystemId::Pendulum;
  if (name == "cartpole") return SystemId::Cartpole;
  if (name == "double-pendulum" || name == "double_pendulum") return SystemId::DoublePendulum;
  return std::nullopt;
}

SystemId system_id(const SystemParams& params) {
  return std::visit(Overloaded{
                        [](const PendulumParams&) { return SystemId::Pendulum; },
                        [](const CartpoleParams&) { return SystemId::Cartpole; },
                        [](const DoublePendulumParams&) { return SystemId::DoublePendulum; },
                    },
                    params);
}

SystemParams default_params(SystemId id) {
  switch (id) {
    case SystemId::Pendulum:
      return PendulumParams{};
    case SystemId::Cartpole:
      return CartpoleParams{};
    case SystemId::DoublePendulum:
      return DoublePendulumParams{};
  }
  return PendulumParams{};
}

int config_dim(SystemId id) { return id == SystemId::Pendulum ? 1 : 2; }

int actuation_dim(SystemId id) { return id == SystemId::DoublePendulum ? 2 : 1; }

std::vector<int> actuated_coordinates(SystemId id) {
  switch (id) {
    case SystemId::Pendulum:
      return {0};
    case SystemId::Cartpole:
      return {1};  // the force drives the cart coordinate x
    case SystemId::DoublePendulum:
      return {0, 1};
  }
  return {};
}

Eigen::VectorXd control_limits(SystemId id) {
  switch (id) {
    case SystemId::Pendulum:
      return Eigen::VectorXd::Constant(1, 3.0);
    case SystemId::Cartpole:
      return Eigen::VectorXd::Constant(1, 10.0);
    case SystemId::DoublePendulum:
      return Eigen::VectorXd::Constant(2, 2.0);
  }
  return {};
}

Eigen::VectorXd SystemState::to_vector() const {
  Eigen::VectorXd x(qdot.size() + q.size());
  x << qdot, q;
  return x;
}

SystemState SystemState::from_vector(const Eigen::VectorXd& x) {
  if (x.size() % 2 != 0) throw PreconditionError("state vector must have even length");
  const Eigen::Index d = x.size() / 2;
  return SystemState{x.head(d), x.tail(d)};
}

SystemState start_state(SystemId id) {
  const int d = config_dim(id);
  SystemState s{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  if (id == SystemId::DoublePendulum) s.q.setConstant(std::numbers::pi);
  return s;
}

SystemState goal_state(SystemId id) {
  const int d = config_dim(id);
  SystemState s{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  if (id != SystemId::DoublePendulum) s.q(0) = std::numbers::pi;
  return s;
}

Eigen::VectorXd true_accel(const SystemParams& params, const SystemState& state,
                           const Eigen::VectorXd& u) {
  const SystemId id = system_id(params);
  check_dims(id, state.q, state.qdot, u);

  return std::visit(
      Overloaded{
          [&](const PendulumParams& p) -> Eigen::VectorXd {
            const double th = state.q(0);
            const double thd = state.qdot(0);
            const double inertia = 0.25 * p.mass * p.length * p.length + p.inertia();
            Eigen::VectorXd qdd(1);
            qdd(0) = (u(0) - p.friction * thd - 0.5 * p.mass * p.length * p.gravity * std::sin(th)) /
                     inertia;
            return qdd;
          },
          [&](const CartpoleParams& p) -> Eigen::VectorXd {
            const double th = state.q(0);
            const double thd = state.qdot(0);
            const double xd = state.qdot(1);
            const double s = std::sin(th);
            const double c = std::cos(th);
            const double total = p.cart_mass + p.pole_mass;
            const double m = p.pole_mass;
            const double l = p.pole_length;
            const double g = p.gravity;
            const double force = u(0) - p.friction * xd;
            const double denom = 4.0 * total - 3.0 * m * c * c;
            Eigen::VectorXd qdd(2);
            qdd(0) = -(3.0 * m * l * thd * thd * s * c + 6.0 * total * g * s + 6.0 * force * c) /
                     (l * denom);
            qdd(1) = (2.0 * m * l * thd * thd * s + 3.0 * m * g * s * c + 4.0 * force) / denom;
            return qdd;
          },
          [&](const DoublePendulumParams& p) -> Eigen::VectorXd {
            const double th1 = state.q(0);
            const double th2 = state.q(1);
            const double w1 = state.qdot(0);
            const double w2 = state.qdot(1);
            const double diff = th1 - th2;
            const double coupling = 0.5 * p.mass2 * p.length1 * p.length2;
            Eigen::Matrix2d mass;
            mass << p.length1 * p.length1 * (0.25 * p.mass1 + p.mass2) + p.inertia1(),
                coupling * std::cos(diff), coupling * std::cos(diff),
                0.25 * p.mass2 * p.length2 * p.length2 + p.inertia2();
            Eigen::Vector2d rhs;
            rhs(0) = -p.length1 * (0.5 * p.mass2 * p.length2 * w2 * w2 * std::sin(diff) -
                                   p.gravity * std::sin(th1) * (0.5 * p.mass1 + p.mass2)) +
                     u(0);
            rhs(1) = 0.5 * p.mass2 * p.length2 *
                         (p.length1 * w1 * w1 * std::sin(diff) + p.gravity * std::sin(th2)) +
                     u(1);
            const double det = mass.determinant();
            if (!(std::abs(det) > 1e-12 * mass.squaredNorm())) {
              throw NumericalError("double pendulum mass matrix is singular");
            }
            return mass.inverse() * rhs;
          },
      },
      params);
}

Eigen::Vector2d endpoint(const SystemParams& params, const Eigen::VectorXd& q) {
  return std::visit(
      Overloaded{
          [&](const PendulumParams& p) -> Eigen::Vector2d {
            return {p.length * std::sin(q(0)), -p.length * std::cos(q(0))};
          },
          [&](const CartpoleParams& p) -> Eigen::Vector2d {
            return {q(1) + p.pole_length * std::sin(q(0)), -p.pole_length * std::cos(q(0))};
          },
          [&](const DoublePendulumParams& p) -> Eigen::Vector2d {
            return {p.length1 * std::sin(q(0)) + p.length2 * std::sin(q(1)),
                    p.length1 * std::cos(q(0)) + p.length2 * std::cos(q(1))};
          },
      },
      params);
}

Eigen::MatrixXd endpoint_jacobian(const SystemParams& params, const Eigen::VectorXd& q) {
  return std::visit(
      Overloaded{
          [&](const PendulumParams& p) -> Eigen::MatrixXd {
            Eigen::MatrixXd j(2, 1);
            j << p.length * std::cos(q(0)), p.length * std::sin(q(0));
            return j;
          },
          [&](const CartpoleParams& p) -> Eigen::MatrixXd {
            Eigen::MatrixXd j(2, 2);
            j << p.pole_length * std::cos(q(0)), 1.0, p.pole_length * std::sin(q(0)), 0.0;
            return j;
          },
          [&](const DoublePendulumParams& p) -> Eigen::MatrixXd {
            Eigen::MatrixXd j(2, 2);
            j << p.length1 * std::cos(q(0)), p.length2 * std::cos(q(1)),
                -p.length1 * std::sin(q(0)), -p.length2 * std::sin(q(1));
            return j;
          },
      },
      params);
}

std::array<Eigen::MatrixXd, 2> endpoint_hessians(const SystemParams& params,
                                                 const Eigen::VectorXd& q) {
  return std::visit(
      Overloaded{
          [&](const PendulumParams& p) -> std::array<Eigen::MatrixXd, 2> {
            Eigen::MatrixXd hx(1, 1), hy(1, 1);
            hx << -p.length * std::sin(q(0));
            hy << p.length * std::cos(q(0));
            return {hx, hy};
          },
          [&](const CartpoleParams& p) -> std::array<Eigen::MatrixXd, 2> {
            Eigen::MatrixXd hx = Eigen::MatrixXd::Zero(2, 2);
            Eigen::MatrixXd hy = Eigen::MatrixXd::Zero(2, 2);
            hx(0, 0) = -p.pole_length * std::sin(q(0));
            hy(0, 0) = p.pole_length * std::cos(q(0));
            return {hx, hy};
          },
          [&](const DoublePendulumParams& p) -> std::array<Eigen::MatrixXd, 2> {
            Eigen::MatrixXd hx = Eigen::MatrixXd::Zero(2, 2);
            Eigen::MatrixXd hy = Eigen::MatrixXd::Zero(2, 2);
            hx(0, 0) = -p.length1 * std::sin(q(0));
            hx(1, 1) = -p.length2 * std::sin(q(1));
            hy(0, 0) = -p.length1 * std::cos(q(0));
            hy(1, 1) = -p.length2 * std::cos(q(1));
            return {hx, hy};
          },
      },
      params);
}

Eigen::Vector2d goal_endpoint(const SystemParams& params) {
  return endpoint(params, goal_state(system_id(params)).q);
}

double mechanical_energy(const SystemParams& params, const SystemState& state) {
  return std::visit(
      Overloaded{
          [&](const PendulumParams& p) {
            const double pivot_inertia = 0.25 * p.mass * p.length * p.length + p.inertia();
            return 0.5 * pivot_inertia * state.qdot(0) * state.qdot(0) -
                   0.5 * p.mass * p.gravity * p.length * std::cos(state.q(0));
          },
          [&](const CartpoleParams& p) {
            const double th = state.q(0);
            const double thd = state.qdot(0);
            const double xd = state.qdot(1);
            const double m = p.pole_mass;
            const double l = p.pole_length;
            const double kinetic = 0.5 * (p.cart_mass + m) * xd * xd +
                                   0.5 * m * l * std::cos(th) * xd * thd +
                                   m * l * l * thd * thd / 6.0;
            return kinetic - 0.5 * m * p.gravity * l * std::cos(th);
          },
          [&](const DoublePendulumParams& p) {
            const double th1 = state.q(0);
            const double th2 = state.q(1);
            const double w1 = state.qdot(0);
            const double w2 = state.qdot(1);
            const double m11 = p.length1 * p.length1 * (0.25 * p.mass1 + p.mass2) + p.inertia1();
            const double m22 = 0.25 * p.mass2 * p.length2 * p.length2 + p.inertia2();
            const double m12 = 0.5 * p.mass2 * p.length1 * p.length2 * std::cos(th1 - th2);
            const double kinetic = 0.5 * (m11 * w1 * w1 + 2.0 * m12 * w1 * w2 + m22 * w2 * w2);
            const double potential =
                p.gravity * (p.mass1 * 0.5 * p.length1 * std::cos(th1) +
                             p.mass2 * (p.length1 * std::cos(th1) + 0.5 * p.length2 * std::cos(th2)));
            return kinetic + potential;
          },
      },
      params);
}

}  // namespace omrl
