#include "dyson/propagators.hpp"

#include <cmath>
#include <string>

namespace dyson {

namespace {

void require_metric(const OperatorMatrix& theta) {
  require_square(theta, "metric");
  bool ok = false;
  try {
    ok = is_positive_definite(theta);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotHermitian) throw;
  }
  if (!ok) fail(ErrorKind::MetricNotPositive, "metric is not Hermitian positive definite");
}

void require_state_dim(const StateVector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) fail(ErrorKind::DimensionMismatch, std::string(what) + ": state dimension mismatch");
}

double dirac_norm2(const StateVector& v) { return v.squaredNorm(); }

EvolutionTrace make_trace(std::vector<double> times, std::vector<StateTriple> states) {
  EvolutionTrace trace;
  trace.times = std::move(times);
  trace.states = std::move(states);
  trace.dirac_norm.reserve(trace.states.size());
  trace.physical_norm.reserve(trace.states.size());
  for (const auto& s : trace.states) {
    trace.dirac_norm.push_back(dirac_norm2(s.phi_friendly));
    trace.physical_norm.push_back(s.phi_ketket.dot(s.phi_friendly).real());
  }
  return trace;
}

} // namespace

StateTriple map_states(const StateVector& phi, const OperatorMatrix& omega) {
  require_state_dim(phi, omega.rows(), "map_states");
  return StateTriple{phi, inverse(omega) * phi, omega.adjoint() * phi};
}

EvolutionTrace evolve_physical(const HamiltonianFamily& family, const StateVector& phi0, const Grid& grid) {
  require_state_dim(phi0, family.dim(), "evolve_physical");
  require_finite(phi0, "initial state");
  const std::vector<double> times = make_time_grid(grid);

  auto rhs = [&](double t, const StateVector& v) -> StateVector { return -kI * (eval_h(family, t) * v); };

  std::vector<StateTriple> states;
  states.reserve(times.size());
  StateVector phi = phi0;
  states.push_back({phi, phi, phi});
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double t = times[k - 1];
    const double h = times[k] - t;
    const StateVector k1 = rhs(t, phi);
    const StateVector k2 = rhs(t + 0.5 * h, phi + 0.5 * h * k1);
    const StateVector k3 = rhs(t + 0.5 * h, phi + 0.5 * h * k2);
    const StateVector k4 = rhs(t + h, phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    require_finite(phi, "physical state");
    states.push_back({phi, phi, phi});
  }
  return make_trace(times, std::move(states));
}

EvolutionTrace reframe(const EvolutionTrace& trace, const FlowTrace& flow) {
  if (trace.times != flow.times) fail(ErrorKind::DimensionMismatch, "reframe: trace and flow grids differ");
  std::vector<StateTriple> states;
  states.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) states.push_back(map_states(trace.states[k].phi, flow.omega[k]));
  return make_trace(trace.times, std::move(states));
}

EvolutionTrace evolve_cryptounitary(const OperatorMatrix& g, const FlowTrace& flow, const StateVector& phi0) {
  if (flow.size() == 0) fail(ErrorKind::ValidationError, "evolve_cryptounitary: empty flow");
  require_square(g, "generator");
  require_finite(g, "generator");
  require_state_dim(phi0, g.rows(), "evolve_cryptounitary");

  const OperatorMatrix& omega0 = flow.omega.front();
  const StateVector friendly0 = inverse(omega0) * phi0;
  const StateVector ketket0 = omega0.adjoint() * (omega0 * friendly0);
  const OperatorMatrix g_adj = g.adjoint();

  std::vector<StateTriple> states;
  states.reserve(flow.size());
  for (std::size_t k = 0; k < flow.size(); ++k) {
    const double t = flow.times[k];
    StateTriple s;
    s.phi_friendly = mat_exp(-kI * t * g) * friendly0;
    s.phi = flow.omega[k] * s.phi_friendly;
    s.phi_ketket = mat_exp(-kI * t * g_adj) * ketket0;
    states.push_back(std::move(s));
  }
  return make_trace(flow.times, std::move(states));
}

std::vector<StateVector> evolve_ketket(const OperatorMatrix& g, const OperatorMatrix& theta0,
                                       const StateVector& phi_friendly0, const std::vector<double>& times) {
  require_metric(theta0);
  require_state_dim(phi_friendly0, g.rows(), "evolve_ketket");
  const StateVector ketket0 = theta0 * phi_friendly0;
  const OperatorMatrix g_adj = g.adjoint();
  std::vector<StateVector> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(mat_exp(-kI * t * g_adj) * ketket0);
  return out;
}

Complex physical_inner(const StateVector& phi_friendly1, const StateVector& phi_friendly2,
                       const OperatorMatrix& theta) {
  require_metric(theta);
  require_state_dim(phi_friendly1, theta.rows(), "physical_inner");
  require_state_dim(phi_friendly2, theta.rows(), "physical_inner");
  return phi_friendly1.dot(theta * phi_friendly2);
}

Covector theta_bra(const StateVector& phi_friendly, const OperatorMatrix& theta) {
  require_state_dim(phi_friendly, theta.rows(), "theta_bra");
  return phi_friendly.adjoint() * theta;
}

OverlapPair static_overlap_drift(const OperatorMatrix& h_f, const StateVector& phi1, const StateVector& phi2,
                                 double t) {
  require_square(h_f, "static Hamiltonian");
  require_finite(h_f, "static Hamiltonian");
  require_state_dim(phi1, h_f.rows(), "static_overlap_drift");
  require_state_dim(phi2, h_f.rows(), "static_overlap_drift");
  if (t == 0.0) {
    const Complex z = phi1.dot(phi2);
    return {z, z};
  }
  const OperatorMatrix u = mat_exp(-kI * t * h_f);
  const Complex lhs = (u * phi1).dot(u * phi2);
  const Complex rhs = phi1.dot(mat_exp(kI * t * (h_f.adjoint() - h_f)) * phi2);
  if (!std::isfinite(lhs.real()) || !std::isfinite(lhs.imag()) || !std::isfinite(rhs.real()) ||
      !std::isfinite(rhs.imag())) {
    fail(ErrorKind::NonFinite, "static_overlap_drift overflowed");
  }
  return {lhs, rhs};
}

std::vector<StateVector> evolve_static_crypto(const OperatorMatrix& h_f, const OperatorMatrix& theta,
                                              const StateVector& phi_friendly0, const std::vector<double>& times) {
  require_square(h_f, "static Hamiltonian");
  if (theta.rows() != h_f.rows() || theta.cols() != h_f.cols()) {
    fail(ErrorKind::DimensionMismatch, "evolve_static_crypto: metric and Hamiltonian dimensions differ");
  }
  require_state_dim(phi_friendly0, h_f.rows(), "evolve_static_crypto");
  const double residual = (h_f.adjoint() * theta - theta * h_f).norm();
  if (!(residual <= 1e-8 * frobenius_floor1(theta))) {
    fail(ErrorKind::NotQuasiHermitian,
         "||H^dagger Theta - Theta H||_F = " + std::to_string(residual) + " exceeds 1e-8 ||Theta||_F");
  }
  std::vector<StateVector> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(mat_exp(-kI * t * h_f) * phi_friendly0);
  return out;
}

} // namespace dyson
