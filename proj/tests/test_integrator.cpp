#include "test_util.hpp"

#include <omrl/errors.hpp>
#include <omrl/integrator.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace omrl;

TEST(Rk4, ZeroDynamicsLeavesStateUnchanged) {
  const StateDerivative f = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()); };
  const Eigen::Vector4d x(0.3, -1.0, 2.0, 0.5);
  EXPECT_EQ(rk4_step(f, x, 0.1), Eigen::VectorXd(x));
}

TEST(Rk4, ExactForConstantAcceleration) {
  const auto f = second_order([](const Eigen::VectorXd& q, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Constant(q.size(), 2.0);
  });
  const Eigen::VectorXd x = rk4_step(f, Eigen::VectorXd::Zero(2), 0.1);
  EXPECT_NEAR(x(0), 0.2, 1e-15);   // qdot
  EXPECT_NEAR(x(1), 0.01, 1e-15);  // q = 1/2 * 2 * 0.1^2
}

TEST(Rk4, PendulumStepHalvingConvergence) {
  const PendulumParams params;
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
  const auto f = second_order([&](const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
    return true_accel(params, SystemState{qd, q}, u);
  });
  const Eigen::Vector2d start(0.0, std::numbers::pi - 0.1);
  Eigen::VectorXd coarse = start;
  for (int i = 0; i < 1000; ++i) coarse = rk4_step(f, coarse, 0.001);
  Eigen::VectorXd fine = start;
  for (int i = 0; i < 10000; ++i) fine = rk4_step(f, fine, 0.0001);
  EXPECT_LT((coarse - fine).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Rk4, LocalErrorIsFifthOrder) {
  // One step vs two half steps differ by O(dt^5); halving dt shrinks that by ~32.
  const auto f = second_order([](const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
    Eigen::VectorXd a(1);
    a(0) = -9.81 * 1.5 * std::sin(q(0)) - 0.1 * qd(0);
    return a;
  });
  const Eigen::Vector2d x0(1.0, 2.0);
  const auto mismatch = [&](double dt) {
    const Eigen::VectorXd full = rk4_step(f, x0, dt);
    const Eigen::VectorXd half = rk4_step(f, rk4_step(f, x0, dt / 2), dt / 2);
    return (full - half).norm();
  };
  const double ratio = mismatch(0.04) / mismatch(0.02);
  EXPECT_GT(ratio, 25.0);
  EXPECT_LT(ratio, 40.0);
}

TEST(Rk4, NonFiniteStageIsReported) {
  const StateDerivative f = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
  };
  EXPECT_FALSE(try_rk4_step(f, Eigen::VectorXd::Zero(2), 0.1).has_value());
  EXPECT_THROW(rk4_step(f, Eigen::VectorXd::Zero(2), 0.1), IntegrationDiverged);
}

TEST(Rk4, RejectsNonPositiveStep) {
  const StateDerivative f = [](const Eigen::VectorXd& x) { return x; };
  EXPECT_THROW(rk4_step(f, Eigen::VectorXd::Zero(2), 0.0), PreconditionError);
}
