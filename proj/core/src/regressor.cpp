#include "omrl/regressor.hpp"

#include "omrl/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace omrl {

int param_count(SystemId id) {
  switch (id) {
    case SystemId::Pendulum:
      return 3;
    case SystemId::Cartpole:
      return 6;
    case SystemId::DoublePendulum:
      return 8;
  }
  return 0;
}

Eigen::MatrixXd regressor(SystemId id, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                          const Eigen::VectorXd& qddot) {
  const int d = config_dim(id);
  if (q.size() != d || qdot.size() != d || qddot.size() != d) {
    throw PreconditionError("regressor sample dimension mismatch");
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, param_count(id));
  switch (id) {
    case SystemId::Pendulum:
      h << qddot(0), qdot(0), std::sin(q(0));
      break;
    case SystemId::Cartpole: {
      // q = [theta, x]
      const double s = std::sin(q(0));
      const double c = std::cos(q(0));
      h(0, 0) = qddot(1);
      h(0, 1) = qddot(0) * c;
      h(0, 2) = qdot(0) * qdot(0) * s;
      h(0, 3) = qdot(1);
      h(1, 4) = qddot(1) * c;
      h(1, 5) = qddot(0);
      break;
    }
    case SystemId::DoublePendulum: {
      const double sd = std::sin(q(0) - q(1));
      const double cd = std::cos(q(0) - q(1));
      h(0, 0) = qddot(0);
      h(0, 1) = qddot(1) * cd;
      h(0, 2) = qdot(1) * qdot(1) * sd;
      h(0, 3) = std::sin(q(0));
      h(1, 4) = qddot(0) * cd;
      h(1, 5) = qddot(1);
      h(1, 6) = qdot(0) * qdot(0) * sd;
      h(1, 7) = std::sin(q(1));
      break;
    }
  }
  return h;
}

Eigen::VectorXd rhs_vector(SystemId id, const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                           double gravity) {
  if (q.size() != config_dim(id) || u.size() != actuation_dim(id)) {
    throw PreconditionError("rhs_vector dimension mismatch");
  }
  if (id == SystemId::Cartpole) {
    Eigen::VectorXd tau(2);
    tau << u(0), -3.0 * gravity * std::sin(q(0));
    return tau;
  }
  return u;
}

Eigen::VectorXd true_param_vector(const SystemParams& params) {
  if (const auto* p = std::get_if<PendulumParams>(&params)) {
    Eigen::VectorXd delta(3);
    delta << p->mass * p->length * p->length / 3.0, p->friction,
        0.5 * p->mass * p->gravity * p->length;
    return delta;
  }
  if (const auto* p = std::get_if<CartpoleParams>(&params)) {
    const double half = 0.5 * p->pole_mass * p->pole_length;
    Eigen::VectorXd delta(6);
    delta << p->cart_mass + p->pole_mass, half, -half, p->friction, 3.0, 2.0 * p->pole_length;
    return delta;
  }
  const auto& p = std::get<DoublePendulumParams>(params);
  const double coupling = 0.5 * p.mass2 * p.length2 * p.length1;
  Eigen::VectorXd delta(8);
  delta << p.length1 * p.length1 * (0.25 * p.mass1 + p.mass2) + p.inertia1(), coupling, coupling,
      -p.gravity * p.length1 * (0.5 * p.mass1 + p.mass2), coupling,
      0.25 * p.mass2 * p.length2 * p.length2 + p.inertia2(), -coupling,
      -0.5 * p.mass2 * p.length2 * p.gravity;
  return delta;
}

NormalSystem stack_observations(std::span<const Observation> observations, SystemId id,
                                double gravity) {
  const int d = config_dim(id);
  const auto rows = static_cast<Eigen::Index>(observations.size()) * d;
  NormalSystem sys{Eigen::MatrixXd(rows, param_count(id)), Eigen::VectorXd(rows)};
  Eigen::Index r = 0;
  for (const auto& o : observations) {
    sys.A.middleRows(r, d) = regressor(id, o.q, o.qdot, o.qddot);
    sys.b.segment(r, d) = rhs_vector(id, o.q, o.tau, gravity);
    r += d;
  }
  return sys;
}

EstimatedDynamics fit_params(std::span<const Observation> observations, SystemId id,
                             double gravity) {
  if (observations.empty()) throw PreconditionError("fit_params needs at least one observation");
  const NormalSystem sys = stack_observations(observations, id, gravity);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(sys.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kPinvTolerance);
  return EstimatedDynamics{id, svd.solve(sys.b), gravity};
}

EstimatedDynamics exact_dynamics(const SystemParams& params) {
  double gravity = 9.81;
  std::visit([&](const auto& p) { gravity = p.gravity; }, params);
  return EstimatedDynamics{system_id(params), true_param_vector(params), gravity};
}

std::optional<Eigen::VectorXd> try_predict_accel(const EstimatedDynamics& est,
                                                 const Eigen::VectorXd& q,
                                                 const Eigen::VectorXd& qdot,
                                                 const Eigen::VectorXd& u) {
  const int d = config_dim(est.system);
  if (est.delta_hat.size() != param_count(est.system)) {
    throw PreconditionError("parameter vector does not match system");
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd bias = regressor(est.system, q, qdot, zero) * est.delta_hat;
  Eigen::MatrixXd mass(d, d);
  Eigen::VectorXd probe = zero;
  for (int j = 0; j < d; ++j) {
    probe(j) = 1.0;
    mass.col(j) = regressor(est.system, q, qdot, probe) * est.delta_hat - bias;
    probe(j) = 0.0;
  }
  const Eigen::VectorXd rhs = rhs_vector(est.system, q, u, est.gravity) - bias;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mass, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double largest = sv(0);
  const double smallest = sv(sv.size() - 1);
  if (!std::isfinite(largest) || !(largest > 1e-12) || !(smallest * kMaxMassCondition > largest)) {
    return std::nullopt;
  }
  Eigen::VectorXd qddot = svd.solve(rhs);
  if (!qddot.allFinite()) return std::nullopt;
  return qddot;
}

Eigen::VectorXd predict_accel(const EstimatedDynamics& est, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qdot, const Eigen::VectorXd& u) {
  auto qddot = try_predict_accel(est, q, qdot, u);
  if (!qddot) throw ModelUnusable("identified mass matrix is singular or ill-conditioned");
  return *std::move(qddot);
}

void write_observations_csv(std::ostream& out, std::span<const Observation> observations) {
  if (observations.empty()) {
    out << "t\n";
    return;
  }
  const auto d = observations.front().q.size();
  const auto a = observations.front().tau.size();
  out << "t";
  for (const char* name : {"q", "qdot", "qddot"}) {
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << name << i;
  }
  for (Eigen::Index i = 0; i < a; ++i) out << ",tau" << i;
  out << '\n';
  out << std::setprecision(17);
  for (const auto& o : observations) {
    out << o.time;
    for (const auto* v : {&o.q, &o.qdot, &o.qddot, &o.tau}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) out << ',' << (*v)(i);
    }
    out << '\n';
  }
}

std::vector<Observation> read_observations_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw PreconditionError("observation CSV is empty");
  int d = 0;
  int a = 0;
  {
    std::stringstream header(line);
    std::string col;
    while (std::getline(header, col, ',')) {
      if (col.rfind("qdot", 0) == 0 || col.rfind("qddot", 0) == 0) continue;
      if (col.rfind("q", 0) == 0) ++d;
      if (col.rfind("tau", 0) == 0) ++a;
    }
  }
  std::vector<Observation> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != static_cast<std::size_t>(1 + 3 * d + a)) {
      throw PreconditionError("observation CSV line " + std::to_string(line_no) +
                              " has the wrong number of columns");
    }
    Observation o;
    o.time = values[0];
    const auto slice = [&](int offset, int n) {
      return Eigen::Map<const Eigen::VectorXd>(values.data() + offset, n).eval();
    };
    o.q = slice(1, d);
    o.qdot = slice(1 + d, d);
    o.qddot = slice(1 + 2 * d, d);
    o.tau = slice(1 + 3 * d, a);
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace omrl
