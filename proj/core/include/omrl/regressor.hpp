#pragma once

#include "omrl/systems.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace omrl {

/// One (possibly noisy) sample of the regressor features and the commanded control.
struct Observation {
  double time = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
  Eigen::VectorXd qddot;
  Eigen::VectorXd tau;
};

/// Number of columns p of the regressor matrix.
int param_count(SystemId id);

/// Regressor H(q, qdot, qddot), shape d x p, independent of physical parameters.
Eigen::MatrixXd regressor(SystemId id, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                          const Eigen::VectorXd& qddot);

/// Generalized-force side of H * delta = tau_rhs. For the cartpole the
/// unactuated row carries the -3 g sin(theta) term moved across from the
/// left-hand side.
Eigen::VectorXd rhs_vector(SystemId id, const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                           double gravity);

/// Parameter vector delta of the true system.
Eigen::VectorXd true_param_vector(const SystemParams& params);

/// Stacked least-squares system A * delta = b.
struct NormalSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

NormalSystem stack_observations(std::span<const Observation> observations, SystemId id,
                                double gravity);

/// Identified parameters plus the context needed to evaluate forward dynamics.
struct EstimatedDynamics {
  SystemId system = SystemId::Pendulum;
  Eigen::VectorXd delta_hat;
  double gravity = 9.81;
};

/// Relative singular value cutoff of the pseudo-inverse.
inline constexpr double kPinvTolerance = 1e-8;
/// Largest mass-matrix condition number predict_accel accepts.
inline constexpr double kMaxMassCondition = 1e8;

/// Minimum-norm least-squares fit delta_hat = pinv(A) b.
/// Throws PreconditionError on an empty observation list.
EstimatedDynamics fit_params(std::span<const Observation> observations, SystemId id,
                             double gravity);

/// Estimate built directly from known parameters (bypasses identification).
EstimatedDynamics exact_dynamics(const SystemParams& params);

/// Forward dynamics of the identified model. H is affine in qddot, so the
/// mass matrix and bias are recovered by probing with unit accelerations.
/// Returns nullopt when the recovered mass matrix is singular or worse
/// conditioned than kMaxMassCondition.
std::optional<Eigen::VectorXd> try_predict_accel(const EstimatedDynamics& est,
                                                 const Eigen::VectorXd& q,
                                                 const Eigen::VectorXd& qdot,
                                                 const Eigen::VectorXd& u);

/// Throwing variant of try_predict_accel (ModelUnusable).
Eigen::VectorXd predict_accel(const EstimatedDynamics& est, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qdot, const Eigen::VectorXd& u);

/// CSV with header t,q0..,qdot0..,qddot0..,tau0..; one row per observation.
void write_observations_csv(std::ostream& out, std::span<const Observation> observations);
std::vector<Observation> read_observations_csv(std::istream& in);

}  // namespace omrl
