#include "test_util.hpp"

#include <omrl/cost.hpp>
#include <omrl/errors.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace omrl;

namespace {

constexpr double kPi = std::numbers::pi;

CostSpec bare_pendulum_spec() {
  CostSpec spec = default_cost_spec(PendulumParams{});
  spec.endpoint_weight.setZero();
  spec.state_weight.setZero();
  spec.squashed_weight.setZero();
  spec.raw_weight.setZero();
  return spec;
}

AugmentedControl control(double u, double xi = 0.0) {
  return {Eigen::VectorXd::Constant(1, u), Eigen::VectorXd::Constant(1, xi)};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Squash, Values) {
  EXPECT_DOUBLE_EQ(squash(0.0, 3.0), 0.0);
  EXPECT_NEAR(squash(10.0, 3.0), 2.999727612787786, 1e-14);
  EXPECT_NEAR(squash(-10.0, 3.0), -2.999727612787786, 1e-14);
  EXPECT_NEAR(squash(1e3, 3.0), 3.0, 1e-12);
}

TEST(Squash, StrictlyInsideLimitsForLargeInputs) {
  for (double u = -1e6; u <= 1e6; u += 997.3) {
    EXPECT_LT(std::abs(squash(u, 3.0)), 3.0) << u;
  }
  for (double u : {-1e6, -40.0, -30.0, 0.5, 12.0, 30.0, 40.0, 1e6}) {
    EXPECT_LT(std::abs(squash(u, 3.0)), 3.0) << u;
    EXPECT_LT(std::abs(squash(u, 10.0)), 10.0) << u;
  }
}

TEST(Squash, DerivativesMatchFiniteDifferences) {
  const double h = 1e-5;
  for (double u : {-4.0, -1.2, 0.0, 0.3, 2.5}) {
    const double fd1 = (squash(u + h, 10.0) - squash(u - h, 10.0)) / (2 * h);
    const double fd2 =
        (squash_derivative(u + h, 10.0) - squash_derivative(u - h, 10.0)) / (2 * h);
    EXPECT_NEAR(squash_derivative(u, 10.0), fd1, 1e-7);
    EXPECT_NEAR(squash_second_derivative(u, 10.0), fd2, 1e-7);
  }
  EXPECT_DOUBLE_EQ(squash_derivative(0.0, 3.0), 1.5);
}

TEST(TaskCost, GoalGivesHuberFloor) {
  const CostSpec spec = default_cost_spec(PendulumParams{});
  const Eigen::Vector2d x(0.0, kPi);
  EXPECT_NEAR(task_cost(spec, x, control(0.0)), 0.1, 1e-12);
}

TEST(TaskCost, RawControlOnlyExample) {
  CostSpec spec = bare_pendulum_spec();
  spec.raw_weight.setOnes();
  spec.alpha = 1.0;
  EXPECT_NEAR(task_cost(spec, Eigen::Vector2d(0.3, 1.0), control(2.0)), 3.0, 1e-12);
}

TEST(TaskCost, VelocitySignSymmetry) {
  std::mt19937_64 rng(1);
  for (SystemId id : test::kAllSystems) {
    CostSpec spec = default_cost_spec(default_params(id));
    spec.near_goal.reset();
    for (int i = 0; i < 20; ++i) {
      const auto s = test::random_state(id, rng);
      const AugmentedControl u{test::random_control(id, rng),
                               Eigen::VectorXd::Zero(config_dim(id))};
      SystemState flipped = s;
      flipped.qdot = -s.qdot;
      EXPECT_DOUBLE_EQ(task_cost(spec, s.to_vector(), u), task_cost(spec, flipped.to_vector(), u));
    }
  }
}

TEST(TaskCost, HuberTermBoundedBelow) {
  const CostSpec spec = bare_pendulum_spec();
  CostSpec weighted = spec;
  weighted.endpoint_weight << 2.0, 2.0;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto s = test::random_state(SystemId::Pendulum, rng);
    EXPECT_GE(task_cost(weighted, s.to_vector(), control(0.0)), std::sqrt(weighted.alpha));
  }
}

TEST(TaskCost, DimensionMismatchThrows) {
  const CostSpec spec = default_cost_spec(CartpoleParams{});
  EXPECT_THROW(task_cost(spec, Eigen::Vector2d(0, 0), control(0.0)), PreconditionError);
}

TEST(AugmentedCost, ZeroSlackEqualsTaskCost) {
  const CostSpec spec = default_cost_spec(DoublePendulumParams{});
  const Eigen::Vector4d x(0.1, -0.3, 2.0, 1.0);
  const AugmentedControl u{Eigen::Vector2d(0.4, -0.9), Eigen::Vector2d::Zero()};
  EXPECT_EQ(augmented_cost(spec, 123.0, x, u), task_cost(spec, x, u));
  EXPECT_EQ(augmented_cost(spec, ExplorationSchedule{1.0, 7}, x, u), task_cost(spec, x, u));
}

TEST(AugmentedCost, PenaltyArithmetic) {
  CostSpec spec = bare_pendulum_spec();
  spec.alpha = 4.0;
  const Eigen::Vector2d x(0.0, 0.0);
  EXPECT_DOUBLE_EQ(task_cost(spec, x, control(0.0, 0.5)), 2.0);
  EXPECT_DOUBLE_EQ(augmented_cost(spec, ExplorationSchedule{1.0, 10}, x, control(0.0, 0.5)), 4.5);
}

TEST(AugmentedCost, UninitializedScheduleThrows) {
  const CostSpec spec = default_cost_spec(PendulumParams{});
  EXPECT_THROW(augmented_cost(spec, ExplorationSchedule{1.0, 0}, Eigen::Vector2d(0, 0), control(0)),
               ScheduleUninitialized);
}

TEST(CostDerivatives, StationaryAtGoal) {
  const CostSpec spec = default_cost_spec(PendulumParams{});
  const auto g = cost_derivatives(spec, 5.0, Eigen::Vector2d(0.0, kPi), control(0.0));
  EXPECT_LT(g.lu.norm(), 1e-15);
  EXPECT_LT(g.lx.norm(), 1e-12);
}

TEST(CostDerivatives, SlackBlockIsExact) {
  const CostSpec spec = default_cost_spec(DoublePendulumParams{});
  const AugmentedControl u{Eigen::Vector2d(0.2, 0.1), Eigen::Vector2d(0.3, -0.4)};
  const auto g = cost_derivatives(spec, 7.5, Eigen::Vector4d(1, 2, 0.5, 0.4), u);
  EXPECT_EQ(g.luu.bottomRightCorner(2, 2), Eigen::Matrix2d(Eigen::Vector2d(15, 15).asDiagonal()));
  EXPECT_TRUE(g.luu.topRightCorner(2, 2).isZero(0.0));
  EXPECT_TRUE(g.lux.isZero(0.0));
}

TEST(CostDerivatives, MatchFiniteDifferences) {
  std::mt19937_64 rng(42);
  const double h = 1e-5;
  std::normal_distribution<double> slack(0.0, 1.0);
  for (SystemId id : test::kAllSystems) {
    const CostSpec spec = default_cost_spec(default_params(id));
    const int d = config_dim(id);
    const int a = actuation_dim(id);
    const double penalty = 3.0;
    int checked = 0;
    while (checked < 100) {
      const auto s = test::random_state(id, rng);
      const Eigen::VectorXd x = s.to_vector();
      // Stay clear of the discontinuous boost boundary.
      if ((endpoint(spec.geometry, s.q) - spec.target).norm() < 0.3) continue;
      Eigen::VectorXd uvec(a + d);
      uvec.head(a) = test::random_control(id, rng) / 2.0;
      for (int i = 0; i < d; ++i) uvec(a + i) = slack(rng);
      ++checked;

      const auto value = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& uu) {
        return augmented_cost(spec, penalty, xx, AugmentedControl::split(uu, a));
      };
      const auto grads = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& uu) {
        return cost_derivatives(spec, penalty, xx, AugmentedControl::split(uu, a));
      };
      const CostDerivatives g = grads(x, uvec);

      for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        EXPECT_LT(rel_err(g.lx(i), (value(xp, uvec) - value(xm, uvec)) / (2 * h)), 1e-4);
        const Eigen::VectorXd col = (grads(xp, uvec).lx - grads(xm, uvec).lx) / (2 * h);
        for (Eigen::Index j = 0; j < x.size(); ++j) EXPECT_LT(rel_err(g.lxx(j, i), col(j)), 1e-4);
        const Eigen::VectorXd cross = (grads(xp, uvec).lu - grads(xm, uvec).lu) / (2 * h);
        for (Eigen::Index j = 0; j < uvec.size(); ++j) {
          EXPECT_LT(rel_err(g.lux(j, i), cross(j)), 1e-4);
        }
      }
      for (Eigen::Index i = 0; i < uvec.size(); ++i) {
        Eigen::VectorXd up = uvec, um = uvec;
        up(i) += h;
        um(i) -= h;
        EXPECT_LT(rel_err(g.lu(i), (value(x, up) - value(x, um)) / (2 * h)), 1e-4);
        const Eigen::VectorXd col = (grads(x, up).lu - grads(x, um).lu) / (2 * h);
        for (Eigen::Index j = 0; j < uvec.size(); ++j) EXPECT_LT(rel_err(g.luu(j, i), col(j)), 1e-4);
      }
      EXPECT_LT((g.lxx - g.lxx.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((g.luu - g.luu.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(CostDerivatives, GradientContinuousNearTarget) {
  const CostSpec spec = default_cost_spec(PendulumParams{});
  const auto g1 = cost_derivatives(spec, 1.0, Eigen::Vector2d(0.0, kPi - 1e-7), control(0));
  const auto g2 = cost_derivatives(spec, 1.0, Eigen::Vector2d(0.0, kPi + 1e-7), control(0));
  EXPECT_LT((g1.lx - g2.lx).norm(), 1e-5);
}

TEST(NearGoal, BoostRaisesSquashedPenalty) {
  const CostSpec spec = default_cost_spec(DoublePendulumParams{});
  ASSERT_TRUE(spec.near_goal.has_value());
  const AugmentedControl u{Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d::Zero()};
  const Eigen::Vector4d at_goal(0, 0, 0, 0);
  EXPECT_TRUE(near_goal(spec, at_goal.tail(2)));
  CostSpec plain = spec;
  plain.near_goal.reset();
  EXPECT_GT(task_cost(spec, at_goal, u), task_cost(plain, at_goal, u));
  EXPECT_FALSE(near_goal(spec, Eigen::Vector2d(kPi, kPi)));
}

TEST(AugmentedControl, SplitJoinRoundTrip) {
  const Eigen::Vector4d u(1, 2, 3, 4);
  const auto parts = AugmentedControl::split(u, 2);
  EXPECT_EQ(parts.u_real, Eigen::VectorXd(Eigen::Vector2d(1, 2)));
  EXPECT_EQ(parts.xi, Eigen::VectorXd(Eigen::Vector2d(3, 4)));
  EXPECT_EQ(parts.joined(), Eigen::VectorXd(u));
}
