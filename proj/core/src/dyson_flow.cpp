#include "dyson/dyson_flow.hpp"

#include <cmath>
#include <string>

namespace dyson {

namespace {

void require_same_dims(const OperatorMatrix& a, const OperatorMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::DimensionMismatch, std::string(what) + ": operand dimensions differ");
  }
}

void check_conditioning(const OperatorMatrix& omega, double t) {
  require_finite(omega, "Omega(t) at t = " + std::to_string(t));
  const double cond = condition_number(omega);
  if (!(cond <= kMaxDysonCondition)) {
    fail(ErrorKind::IllConditionedDyson,
         "cond(Omega) = " + std::to_string(cond) + " exceeds 1e12 at t = " + std::to_string(t));
  }
}

} // namespace

bool operator==(const FlowTrace& a, const FlowTrace& b) {
  if (a.dt != b.dt || a.times != b.times || a.sigma.size() != b.sigma.size() || a.omega.size() != b.omega.size()) {
    return false;
  }
  auto same = [](const OperatorMatrix& x, const OperatorMatrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  for (std::size_t k = 0; k < a.sigma.size(); ++k) {
    if (!same(a.sigma[k], b.sigma[k])) return false;
  }
  for (std::size_t k = 0; k < a.omega.size(); ++k) {
    if (!same(a.omega[k], b.omega[k])) return false;
  }
  return true;
}

std::vector<double> make_time_grid(const Grid& grid) {
  if (!(grid.dt > 0.0) || !std::isfinite(grid.dt)) fail(ErrorKind::DegenerateStep, "dt must be positive");
  if (!(grid.t_final > 0.0) || !std::isfinite(grid.t_final)) {
    fail(ErrorKind::ValidationError, "t_final must be positive");
  }
  const auto steps = std::max<long long>(1, std::llround(grid.t_final / grid.dt));
  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  for (long long k = 0; k <= steps; ++k) {
    times[static_cast<std::size_t>(k)] = grid.t_final * static_cast<double>(k) / static_cast<double>(steps);
  }
  return times;
}

OperatorMatrix estimate_omegadot_fd(const OperatorMatrix& omega0, const OperatorMatrix& omega_delta, double delta) {
  if (!(delta > 0.0)) fail(ErrorKind::DegenerateStep, "finite-difference step must be positive");
  require_same_dims(omega0, omega_delta, "estimate_omegadot_fd");
  return (omega_delta - omega0) / delta;
}

OperatorMatrix sigma_from_omegadot(const OperatorMatrix& omega0, const OperatorMatrix& omegadot0) {
  require_same_dims(omega0, omegadot0, "sigma_from_omegadot");
  return kI * omegadot0 * inverse(omega0);
}

OperatorMatrix sigma_rhs(const OperatorMatrix& h, const OperatorMatrix& hdot, const OperatorMatrix& sigma) {
  require_same_dims(h, sigma, "sigma_rhs");
  require_same_dims(h, hdot, "sigma_rhs");
  return hdot - kI * (h * sigma - sigma * h);
}

OperatorMatrix omega_rhs(const OperatorMatrix& sigma, const OperatorMatrix& omega) {
  require_same_dims(sigma, omega, "omega_rhs");
  return -kI * (sigma * omega);
}

FlowTrace integrate_flow(const HamiltonianFamily& family, const DysonSeed& seed, const Grid& grid) {
  const Eigen::Index n = family.dim();
  if (seed.omega0.rows() != n || seed.omega0.cols() != n || seed.sigma0.rows() != n || seed.sigma0.cols() != n) {
    fail(ErrorKind::DimensionMismatch, "seed dimension does not match the Hamiltonian family");
  }
  if (!(grid.dt <= grid.t_final / 2.0)) {
    fail(ErrorKind::ValidationError, "integrate_flow needs dt <= t_final / 2");
  }
  require_finite(seed.sigma0, "sigma(0)");
  check_conditioning(seed.omega0, 0.0);

  FlowTrace flow;
  flow.times = make_time_grid(grid);
  flow.dt = flow.times.size() > 1 ? flow.times[1] : grid.dt;
  flow.sigma.reserve(flow.times.size());
  flow.omega.reserve(flow.times.size());
  flow.sigma.push_back(seed.sigma0);
  flow.omega.push_back(seed.omega0);

  OperatorMatrix sigma = seed.sigma0;
  OperatorMatrix omega = seed.omega0;
  for (std::size_t k = 1; k < flow.times.size(); ++k) {
    const double t = flow.times[k - 1];
    const double h = flow.times[k] - t;
    const double mid = t + 0.5 * h;

    const OperatorMatrix h0 = eval_h(family, t);
    const OperatorMatrix hm = eval_h(family, mid);
    const OperatorMatrix h1 = eval_h(family, t + h);
    const OperatorMatrix d0 = eval_hdot(family, t);
    const OperatorMatrix dm = eval_hdot(family, mid);
    const OperatorMatrix d1 = eval_hdot(family, t + h);

    const OperatorMatrix ks1 = sigma_rhs(h0, d0, sigma);
    const OperatorMatrix ko1 = omega_rhs(sigma, omega);

    const OperatorMatrix s2 = sigma + 0.5 * h * ks1;
    const OperatorMatrix o2 = omega + 0.5 * h * ko1;
    const OperatorMatrix ks2 = sigma_rhs(hm, dm, s2);
    const OperatorMatrix ko2 = omega_rhs(s2, o2);

    const OperatorMatrix s3 = sigma + 0.5 * h * ks2;
    const OperatorMatrix o3 = omega + 0.5 * h * ko2;
    const OperatorMatrix ks3 = sigma_rhs(hm, dm, s3);
    const OperatorMatrix ko3 = omega_rhs(s3, o3);

    const OperatorMatrix s4 = sigma + h * ks3;
    const OperatorMatrix o4 = omega + h * ko3;
    const OperatorMatrix ks4 = sigma_rhs(h1, d1, s4);
    const OperatorMatrix ko4 = omega_rhs(s4, o4);

    sigma += (h / 6.0) * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4);
    omega += (h / 6.0) * (ko1 + 2.0 * ko2 + 2.0 * ko3 + ko4);

    require_finite(sigma, "sigma(t) at t = " + std::to_string(flow.times[k]));
    check_conditioning(omega, flow.times[k]);
    flow.sigma.push_back(sigma);
    flow.omega.push_back(omega);
  }
  return flow;
}

DerivedOperators derived_operators(const HamiltonianFamily& family, const FlowTrace& flow, std::size_t node) {
  if (node >= flow.size()) fail(ErrorKind::ValidationError, "node index out of range");
  const OperatorMatrix& omega = flow.omega[node];
  const OperatorMatrix omega_inv = inverse(omega);
  const OperatorMatrix h = eval_h(family, flow.times[node]);

  DerivedOperators out;
  out.H = omega_inv * h * omega;
  out.Sigma = omega_inv * flow.sigma[node] * omega;
  out.Theta = omega.adjoint() * omega;
  out.G = out.H - out.Sigma;
  if (!is_positive_definite(out.Theta)) {
    fail(ErrorKind::MetricNotPositive, "Theta is not positive definite at t = " + std::to_string(flow.times[node]));
  }
  return out;
}

OperatorMatrix generator_g0(const OperatorMatrix& h0, const DysonSeed& seed) {
  require_same_dims(h0, seed.omega0, "generator_g0");
  require_same_dims(h0, seed.sigma0, "generator_g0");
  return inverse(seed.omega0) * (h0 - seed.sigma0) * seed.omega0;
}

OperatorMatrix generator_from_omegadot(const OperatorMatrix& h0, const OperatorMatrix& omega0,
                                       const OperatorMatrix& omegadot0) {
  require_same_dims(h0, omega0, "generator_from_omegadot");
  const OperatorMatrix omega_inv = inverse(omega0);
  return omega_inv * h0 * omega0 - kI * omega_inv * omegadot0;
}

} // namespace dyson
