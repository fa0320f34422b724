#include "omrl/ilqr.hpp"

#include "omrl/errors.hpp"
#include "omrl/integrator.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace omrl {

namespace {

bool bad_state(const Eigen::VectorXd& x, double divergence_norm) {
  return !x.allFinite() || x.norm() > divergence_norm;
}

}  // namespace

std::optional<Linearization> DiscreteDynamics::linearize(const Eigen::VectorXd& x,
                                                         const Eigen::VectorXd& u) const {
  const Eigen::Index n = x.size();
  const Eigen::Index m = u.size();
  Linearization lin{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, m)};
  const double inv = 0.5 / fd_step;

  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp(i) = x(i) + fd_step;
    auto plus = step(xp, u);
    xp(i) = x(i) - fd_step;
    auto minus = step(xp, u);
    xp(i) = x(i);
    if (!plus || !minus) return std::nullopt;
    lin.fx.col(i) = (*plus - *minus) * inv;
  }
  Eigen::VectorXd up = u;
  for (Eigen::Index j = 0; j < m; ++j) {
    up(j) = u(j) + fd_step;
    auto plus = step(x, up);
    up(j) = u(j) - fd_step;
    auto minus = step(x, up);
    up(j) = u(j);
    if (!plus || !minus) return std::nullopt;
    lin.fu.col(j) = (*plus - *minus) * inv;
  }
  if (!lin.fx.allFinite() || !lin.fu.allFinite()) return std::nullopt;
  return lin;
}

DiscreteDynamics discretize(AccelFunction accel, double delta, double fd_step) {
  if (!(delta > 0.0)) throw PreconditionError("planning timestep must be positive");
  auto step = [accel = std::move(accel), delta](const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& u)
      -> std::optional<Eigen::VectorXd> {
    const Eigen::Index d = x.size() / 2;
    bool usable = true;
    const StateDerivative f = [&](const Eigen::VectorXd& s) -> Eigen::VectorXd {
      Eigen::VectorXd sdot(s.size());
      auto qddot = accel(s.tail(d), s.head(d), u);
      if (!qddot) {
        usable = false;
        sdot.setConstant(std::numeric_limits<double>::quiet_NaN());
        return sdot;
      }
      sdot.head(d) = *qddot;
      sdot.tail(d) = s.head(d);
      return sdot;
    };
    auto next = try_rk4_step(f, x, delta);
    if (!usable) return std::nullopt;
    return next;
  };
  return DiscreteDynamics{std::move(step), fd_step};
}

DiscreteDynamics discretize_state(
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> xdot,
    double delta, double fd_step) {
  if (!(delta > 0.0)) throw PreconditionError("planning timestep must be positive");
  auto step = [xdot = std::move(xdot), delta](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return try_rk4_step([&](const Eigen::VectorXd& s) { return xdot(s, u); }, x, delta);
  };
  return DiscreteDynamics{std::move(step), fd_step};
}

StageCost make_stage_cost(CostSpec spec, double penalty) {
  const int a = actuation_dim(spec.system());
  StageCost cost;
  cost.value = [spec, penalty, a](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return augmented_cost(spec, penalty, x, AugmentedControl::split(u, a));
  };
  cost.derivatives = [spec, penalty, a](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return cost_derivatives(spec, penalty, x, AugmentedControl::split(u, a));
  };
  return cost;
}

std::optional<BackwardPassResult> backward_pass(const std::vector<Linearization>& dynamics,
                                                const std::vector<CostDerivatives>& costs,
                                                double reg) {
  if (dynamics.size() != costs.size() || dynamics.empty()) {
    throw PreconditionError("backward_pass needs one linearization and cost expansion per step");
  }
  const std::size_t horizon = dynamics.size();
  const Eigen::Index n = dynamics.front().fx.rows();
  const Eigen::Index m = dynamics.front().fu.cols();

  BackwardPassResult out;
  out.k.resize(horizon);
  out.K.resize(horizon);
  out.value.resize(horizon + 1);
  out.value[horizon] = QuadraticValue{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};

  Eigen::VectorXd vx = out.value[horizon].vx;
  Eigen::MatrixXd vxx = out.value[horizon].vxx;
  const Eigen::MatrixXd reg_eye = reg * Eigen::MatrixXd::Identity(m, m);

  for (std::size_t i = horizon; i-- > 0;) {
    const auto& fx = dynamics[i].fx;
    const auto& fu = dynamics[i].fu;
    const auto& l = costs[i];

    const Eigen::VectorXd qx = l.lx + fx.transpose() * vx;
    const Eigen::VectorXd qu = l.lu + fu.transpose() * vx;
    const Eigen::MatrixXd vxx_fx = vxx * fx;
    const Eigen::MatrixXd qxx = l.lxx + fx.transpose() * vxx_fx;
    const Eigen::MatrixXd qux = l.lux + fu.transpose() * vxx_fx;
    Eigen::MatrixXd quu = l.luu + fu.transpose() * vxx * fu;
    quu = 0.5 * (quu + quu.transpose()).eval();

    Eigen::LLT<Eigen::MatrixXd> llt(quu + reg_eye);
    if (llt.info() != Eigen::Success) return std::nullopt;

    const Eigen::VectorXd k = -llt.solve(qu);
    const Eigen::MatrixXd K = -llt.solve(qux);
    if (!k.allFinite() || !K.allFinite()) return std::nullopt;

    out.expected_linear += k.dot(qu);
    out.expected_quadratic += 0.5 * k.dot(quu * k);

    // Equal to Qx - Qux' Quu^-1 Qu (and the Vxx analogue) when reg = 0; this
    // form stays consistent with the regularized gains.
    vx = qx + K.transpose() * (quu * k) + K.transpose() * qu + qux.transpose() * k;
    vxx = qxx + K.transpose() * quu * K + K.transpose() * qux + qux.transpose() * K;
    vxx = 0.5 * (vxx + vxx.transpose()).eval();

    out.k[i] = k;
    out.K[i] = K;
    out.value[i] = QuadraticValue{vx, vxx};
  }
  return out;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::MaxIterations:
      return "max-iterations";
    case SolveStatus::Stalled:
      return "stalled";
    case SolveStatus::Diverged:
      return "diverged";
  }
  return "unknown";
}

TrajectorySolution rollout(const Eigen::VectorXd& x0, const std::vector<Eigen::VectorXd>& controls,
                           const DiscreteDynamics& dynamics, const StageCost& cost,
                           double divergence_norm) {
  TrajectorySolution traj;
  traj.states.reserve(controls.size() + 1);
  traj.states.push_back(x0);
  traj.controls = controls;
  for (const auto& u : controls) {
    const Eigen::VectorXd& x = traj.states.back();
    auto next = dynamics.step(x, u);
    traj.total_cost += cost.value(x, u);
    if (!next || bad_state(*next, divergence_norm)) {
      traj.diverged = true;
      traj.total_cost = std::numeric_limits<double>::infinity();
      return traj;
    }
    traj.states.push_back(*std::move(next));
  }
  if (!std::isfinite(traj.total_cost)) traj.diverged = true;
  return traj;
}

TrajectorySolution forward_pass(const Eigen::VectorXd& x0, const TrajectorySolution& prev,
                                const BackwardPassResult& gains, const DiscreteDynamics& dynamics,
                                const StageCost& cost, double step_scale,
                                double divergence_norm) {
  TrajectorySolution traj;
  const std::size_t horizon = prev.controls.size();
  traj.states.reserve(horizon + 1);
  traj.controls.reserve(horizon);
  traj.states.push_back(x0);
  for (std::size_t t = 0; t < horizon; ++t) {
    const Eigen::VectorXd& x = traj.states.back();
    Eigen::VectorXd u =
        prev.controls[t] + step_scale * gains.k[t] + gains.K[t] * (x - prev.states[t]);
    auto next = dynamics.step(x, u);
    traj.total_cost += cost.value(x, u);
    traj.controls.push_back(std::move(u));
    if (!next || bad_state(*next, divergence_norm)) {
      traj.diverged = true;
      traj.total_cost = std::numeric_limits<double>::infinity();
      return traj;
    }
    traj.states.push_back(*std::move(next));
  }
  if (!std::isfinite(traj.total_cost)) traj.diverged = true;
  return traj;
}

TrajectorySolution solve(const Eigen::VectorXd& x0, const std::vector<Eigen::VectorXd>& u_init,
                         const DiscreteDynamics& dynamics, const StageCost& cost,
                         const ILQRConfig& config) {
  if (u_init.empty()) throw PreconditionError("solve needs at least one control");
  TrajectorySolution traj = rollout(x0, u_init, dynamics, cost, config.divergence_norm);
  traj.final_reg = config.reg_init;
  if (traj.diverged) {
    traj.status = SolveStatus::Diverged;
    return traj;
  }
  traj.cost_history.push_back(traj.total_cost);

  const std::size_t horizon = u_init.size();
  std::vector<Linearization> lins(horizon);
  std::vector<CostDerivatives> derivs(horizon);
  double reg = config.reg_init;
  SolveStatus status = SolveStatus::MaxIterations;
  BackwardPassResult last_gains;
  int iter = 0;

  for (; iter < config.max_iters; ++iter) {
    bool expansion_ok = true;
    for (std::size_t t = 0; t < horizon; ++t) {
      auto lin = dynamics.linearize(traj.states[t], traj.controls[t]);
      if (!lin) {
        expansion_ok = false;
        break;
      }
      lins[t] = *std::move(lin);
      derivs[t] = cost.derivatives(traj.states[t], traj.controls[t]);
    }
    if (!expansion_ok) {
      status = iter == 0 ? SolveStatus::Diverged : SolveStatus::Stalled;
      break;
    }

    bool accepted = false;
    bool any_finite = false;
    bool converged = false;
    while (!accepted) {
      auto gains = backward_pass(lins, derivs, reg);
      if (!gains) {
        reg *= config.reg_factor;
        if (reg > config.reg_max) break;
        continue;
      }
      const double predicted = -(gains->expected_linear + gains->expected_quadratic);
      if (predicted <= config.convergence_tol * std::max(std::abs(traj.total_cost), 1e-12) &&
          reg <= config.reg_init) {
        last_gains = *std::move(gains);
        converged = true;
        break;
      }
      double scale = 1.0;
      for (int b = 0; b <= config.max_backtracks; ++b, scale *= 0.5) {
        TrajectorySolution candidate =
            forward_pass(x0, traj, *gains, dynamics, cost, scale, config.divergence_norm);
        if (candidate.diverged) continue;
        any_finite = true;
        if (candidate.total_cost < traj.total_cost) {
          const double rel = (traj.total_cost - candidate.total_cost) /
                             std::max(std::abs(traj.total_cost), 1e-12);
          candidate.cost_history = std::move(traj.cost_history);
          candidate.cost_history.push_back(candidate.total_cost);
          traj = std::move(candidate);
          last_gains = *std::move(gains);
          accepted = true;
          converged = rel < config.convergence_tol;
          break;
        }
      }
      if (accepted) {
        reg = std::max(reg / config.reg_factor, config.reg_min);
      } else {
        reg *= config.reg_factor;
        if (reg > config.reg_max) break;
      }
    }

    if (converged) {
      status = SolveStatus::Converged;
      if (accepted) ++iter;
      break;
    }
    if (!accepted) {
      status = (iter == 0 && !any_finite) ? SolveStatus::Diverged : SolveStatus::Stalled;
      break;
    }
  }

  traj.open_loop = std::move(last_gains.k);
  traj.feedback = std::move(last_gains.K);
  traj.status = status;
  traj.iterations = iter;
  traj.final_reg = reg;
  return traj;
}

std::vector<Eigen::VectorXd> shift_controls(const std::vector<Eigen::VectorXd>& controls,
                                            int shift) {
  if (controls.empty()) return {};
  const std::size_t n = controls.size();
  const std::size_t s = static_cast<std::size_t>(std::clamp(shift, 0, static_cast<int>(n)));
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  for (std::size_t i = s; i < n; ++i) out.push_back(controls[i]);
  while (out.size() < n) out.push_back(controls.back());
  return out;
}

Eigen::VectorXd fallback_dynamics(SystemId id, const Eigen::VectorXd& tau,
                                  const Eigen::VectorXd& xi) {
  const int d = config_dim(id);
  if (tau.size() != actuation_dim(id) || xi.size() != d) {
    throw PreconditionError("fallback_dynamics dimension mismatch");
  }
  Eigen::VectorXd qddot = xi;
  const auto coords = actuated_coordinates(id);
  for (std::size_t i = 0; i < coords.size(); ++i) qddot(coords[i]) += tau(static_cast<Eigen::Index>(i));
  return qddot;
}

}  // namespace omrl
