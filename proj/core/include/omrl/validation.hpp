#pragma once

#include "omrl/systems.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace omrl {

/// Outcome of one self-check: `value` must not exceed `threshold`.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Largest |H(q, qdot, qddot_true) delta_true - tau_rhs| over random samples.
CheckResult check_regressor_identity(SystemId id, int samples = 1000, std::uint64_t seed = 1);

/// Relative mechanical-energy drift over `duration` seconds of frictionless,
/// unforced RK4 simulation at step `dt`.
CheckResult check_energy_drift(SystemId id, double dt, double duration = 10.0);

/// |iLQR cost - Riccati optimum| on a double-integrator LQ problem.
CheckResult check_lqr_exactness(int horizon = 50);

/// All of the above at each benchmark's simulator step.
std::vector<CheckResult> run_validation_suite();

}  // namespace omrl
