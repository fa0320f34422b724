#pragma once

#include <omrl/systems.hpp>

#include <Eigen/Core>

#include <numbers>
#include <random>

namespace omrl::test {

inline SystemState random_state(SystemId id, std::mt19937_64& rng, double max_rate = 4.0) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> rate(-max_rate, max_rate);
  const int d = config_dim(id);
  SystemState s{Eigen::VectorXd(d), Eigen::VectorXd(d)};
  for (int i = 0; i < d; ++i) {
    s.q(i) = angle(rng);
    s.qdot(i) = rate(rng);
  }
  return s;
}

inline Eigen::VectorXd random_control(SystemId id, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Eigen::VectorXd limits = control_limits(id);
  Eigen::VectorXd u(limits.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = limits(i) * unit(rng);
  return u;
}

inline constexpr SystemId kAllSystems[] = {SystemId::Pendulum, SystemId::Cartpole,
                                           SystemId::DoublePendulum};

}  // namespace omrl::test

#include <omrl/integrator.hpp>
#include <omrl/regressor.hpp>

#include <vector>

namespace omrl::test {

/// Trajectory driven by piecewise-constant random controls, sampled every
/// `dt`, with optional Gaussian noise on q, qdot and qddot.
inline std::vector<Observation> random_torque_rollout(const SystemParams& params, int samples,
                                                      std::uint64_t seed, double noise = 0.0,
                                                      double dt = 0.01) {
  const SystemId id = system_id(params);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SystemState s = start_state(id);
  s.q.array() += 0.1;
  std::vector<Observation> out;
  Eigen::VectorXd u = random_control(id, rng);
  for (int k = 0; k < samples; ++k) {
    if (k % 10 == 0) u = random_control(id, rng);
    const Eigen::VectorXd qdd = true_accel(params, s, u);
    Observation o{k * dt, s.q, s.qdot, qdd, u};
    if (noise > 0.0) {
      for (auto* v : {&o.q, &o.qdot, &o.qddot}) {
        for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) += noise * gauss(rng);
      }
    }
    out.push_back(o);
    const auto f = second_order([&](const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
      return true_accel(params, SystemState{qd, q}, u);
    });
    const Eigen::VectorXd x = rk4_step(f, rk4_step(f, s.to_vector(), dt / 2), dt / 2);
    s = SystemState::from_vector(x);
  }
  return out;
}

}  // namespace omrl::test
