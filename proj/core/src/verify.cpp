#include "dyson/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>

namespace dyson {

namespace {

void require_aligned(const EvolutionTrace& trace, std::size_t n, const char* what) {
  if (trace.size() != n) fail(ErrorKind::DimensionMismatch, std::string(what) + ": grids are not aligned");
}

struct Residuals {
  double g_constancy;
  double cross_backend;
};

Residuals pipeline_residuals(const ModelSpec& spec, const DysonSeed& seed, const Grid& grid) {
  const FlowTrace flow = integrate_flow(spec.family, seed, grid);
  const OperatorMatrix g = generator_g0(eval_h(spec.family, 0.0), seed);
  const StateVector phi0 = initial_state(spec);
  const EvolutionTrace physical = evolve_physical(spec.family, phi0, grid);
  const EvolutionTrace crypto = evolve_cryptounitary(g, flow, phi0);
  return {check_g_constancy(spec.family, flow), cross_backend_residual(physical, crypto)};
}

} // namespace

double check_g_constancy(const HamiltonianFamily& family, const FlowTrace& flow) {
  if (flow.size() == 0) return 0.0;
  const OperatorMatrix g0 = derived_operators(family, flow, 0).G;
  const double scale = frobenius_floor1(g0);
  double worst = 0.0;
  for (std::size_t k = 1; k < flow.size(); ++k) {
    const OperatorMatrix gk = derived_operators(family, flow, k).G;
    worst = std::max(worst, (gk - g0).norm() / scale);
  }
  return worst;
}

double check_theta_evolution(const FlowTrace& flow, const OperatorMatrix& g) {
  if (flow.size() == 0) return 0.0;
  const std::vector<OperatorMatrix> thetas = metric_trace(flow);
  const OperatorMatrix& theta0 = thetas.front();
  const double scale = frobenius_floor1(theta0);
  const OperatorMatrix g_adj = g.adjoint();
  double worst = 0.0;
  for (std::size_t k = 0; k < flow.size(); ++k) {
    const double t = flow.times[k];
    const OperatorMatrix predicted = mat_exp(-kI * t * g_adj) * theta0 * mat_exp(kI * t * g);
    worst = std::max(worst, (thetas[k] - predicted).norm() / scale);
  }
  return worst;
}

double check_dieudonne(const OperatorMatrix& h_f, const OperatorMatrix& theta) {
  require_square(h_f, "check_dieudonne Hamiltonian");
  if (theta.rows() != h_f.rows() || theta.cols() != h_f.cols()) {
    fail(ErrorKind::DimensionMismatch, "check_dieudonne: metric and Hamiltonian dimensions differ");
  }
  const double residual = (h_f.adjoint() * theta - theta * h_f).norm();
  return residual / (frobenius_floor1(h_f) * std::max(1.0, spectral_norm(theta)));
}

std::vector<OperatorMatrix> metric_trace(const FlowTrace& flow) {
  std::vector<OperatorMatrix> thetas;
  thetas.reserve(flow.size());
  for (const auto& omega : flow.omega) thetas.push_back(omega.adjoint() * omega);
  return thetas;
}

UnitarityDrifts check_unitarity(const EvolutionTrace& trace, const std::vector<OperatorMatrix>& thetas) {
  UnitarityDrifts out;
  if (trace.size() <= 1) return out;
  if (thetas.size() != trace.size()) fail(ErrorKind::DimensionMismatch, "check_unitarity: grids are not aligned");

  auto metric_norm = [&](std::size_t k) {
    const StateVector& f = trace.states[k].phi_friendly;
    return f.dot(thetas[k] * f);
  };
  const double phys0 = trace.states[0].phi.squaredNorm();
  const Complex ketket0 = metric_norm(0);
  const double dirac0 = trace.states[0].phi_friendly.squaredNorm();

  for (std::size_t k = 1; k < trace.size(); ++k) {
    out.physical_norm_drift = std::max(out.physical_norm_drift, std::abs(trace.states[k].phi.squaredNorm() - phys0));
    out.ketket_overlap_drift = std::max(out.ketket_overlap_drift, std::abs(metric_norm(k) - ketket0));
    out.dirac_norm_drift =
        std::max(out.dirac_norm_drift, std::abs(trace.states[k].phi_friendly.squaredNorm() - dirac0));
  }
  out.physical_norm_drift /= std::max(1.0, phys0);
  out.ketket_overlap_drift /= std::max(1.0, std::abs(ketket0));
  out.dirac_norm_drift /= std::max(1.0, dirac0);
  return out;
}

double ketket_pair_drift(const EvolutionTrace& a, const EvolutionTrace& b, const std::vector<OperatorMatrix>& thetas) {
  require_aligned(b, a.size(), "ketket_pair_drift");
  if (thetas.size() != a.size()) fail(ErrorKind::DimensionMismatch, "ketket_pair_drift: grids are not aligned");
  if (a.size() == 0) return 0.0;
  const Complex reference = a.states[0].phi.dot(b.states[0].phi);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Complex overlap = a.states[k].phi_friendly.dot(thetas[k] * b.states[k].phi_friendly);
    worst = std::max(worst, std::abs(overlap - reference));
  }
  return worst / std::max(1.0, std::abs(reference));
}

double cross_backend_residual(const EvolutionTrace& a, const EvolutionTrace& b) {
  require_aligned(b, a.size(), "cross_backend_residual");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (a.states[k].phi - b.states[k].phi).norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------

std::map<std::string, double> default_tolerances() {
  return {
      {kGConstancy, 1e-6},        {kThetaIntertwine, 1e-6},    {kCrossBackend, 1e-6},
      {kPhysicalNormDrift, 1e-6}, {kKetketOverlapDrift, 1e-6}, {kDieudonne, 1e-10},
      {kStaticDieudonne, 1e-10},
  };
}

void RunReport::record(const std::string& name, double value) {
  residuals[name] = value;
  const auto tol = tolerances.find(name);
  const double limit = tol == tolerances.end() ? 0.0 : tol->second;
  status[name] = std::isfinite(value) && value >= 0.0 && value <= limit;
}

bool RunReport::passed() const {
  if (!failures.empty()) return false;
  return std::all_of(status.begin(), status.end(), [](const auto& kv) { return kv.second; });
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json j;
  j["model"] = report.model;
  j["grid"] = {{"t_final", report.grid.t_final}, {"dt", report.grid.dt}};
  j["residuals"] = report.residuals;
  j["tolerances"] = report.tolerances;
  j["status"] = report.status;
  j["diagnostics"] = report.diagnostics;
  j["orders"] = report.orders;
  j["failures"] = nlohmann::json::array();
  for (const auto& [check, error] : report.failures) j["failures"].push_back({{"check", check}, {"error", error}});
  j["passed"] = report.passed();
  j["wall_time_s"] = report.wall_time_s;
  return j;
}

StateVector initial_state(const ModelSpec& spec) {
  if (spec.output.initial_state) return *spec.output.initial_state;
  const Eigen::Index n = spec.family.dim();
  return StateVector::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
}

ExperimentRun run_experiment(const ModelSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  validate(spec);

  RunReport report;
  report.model = spec.name;
  report.grid = spec.grid;
  report.tolerances = default_tolerances();
  for (const auto& [name, tol] : spec.output.tolerances) {
    if (!report.tolerances.count(name)) fail(ErrorKind::ValidationError, "unknown tolerance name '" + name + "'");
    report.tolerances[name] = tol;
  }

  const HamiltonianFamily& family = spec.family;
  const Eigen::Index n = family.dim();
  DysonSeed seed = build_dyson_seed(spec.seed, spec.rng_seed, n, spec.cond_bound);
  FlowTrace flow = integrate_flow(family, seed, spec.grid);
  OperatorMatrix g = generator_g0(eval_h(family, 0.0), seed);

  const StateVector phi0 = initial_state(spec);
  EvolutionTrace physical = reframe(evolve_physical(family, phi0, spec.grid), flow);
  EvolutionTrace crypto = evolve_cryptounitary(g, flow, phi0);
  const std::vector<OperatorMatrix> thetas = metric_trace(flow);

  double dieudonne = 0.0;
  double max_cond = 0.0;
  for (std::size_t k = 0; k < flow.size(); ++k) {
    const DerivedOperators d = derived_operators(family, flow, k);
    dieudonne = std::max(dieudonne, check_dieudonne(d.H, d.Theta));
    max_cond = std::max(max_cond, condition_number(flow.omega[k]));
  }

  const UnitarityDrifts direct = check_unitarity(physical, thetas);
  const UnitarityDrifts closed = check_unitarity(crypto, thetas);
  double ketket = closed.ketket_overlap_drift;
  if (n >= 2) {
    // Probe pair: phi_1(0) = e_1, phi_2(0) = e_2, i.e. Phi_i(0) = Omega(0)^-1 e_i.
    const EvolutionTrace p1 = evolve_cryptounitary(g, flow, StateVector::Unit(n, 0));
    const EvolutionTrace p2 = evolve_cryptounitary(g, flow, StateVector::Unit(n, 1));
    ketket = std::max({ketket, ketket_pair_drift(p1, p2, thetas), ketket_pair_drift(p1, p1, thetas),
                       ketket_pair_drift(p2, p2, thetas)});
  }

  report.record(kGConstancy, check_g_constancy(family, flow));
  report.record(kThetaIntertwine, check_theta_evolution(flow, g));
  report.record(kDieudonne, dieudonne);
  report.record(kCrossBackend, cross_backend_residual(physical, crypto));
  report.record(kPhysicalNormDrift, direct.physical_norm_drift);
  report.record(kKetketOverlapDrift, ketket);
  report.diagnostics["dirac_norm_drift"] = closed.dirac_norm_drift;
  report.diagnostics["reconstructed_norm_drift"] = closed.physical_norm_drift;
  report.diagnostics["max_omega_condition"] = max_cond;

  if (spec.static_pair) {
    const auto& pair = *spec.static_pair;
    report.record(kStaticDieudonne, check_dieudonne(pair.hamiltonian, pair.metric));
    try {
      (void)evolve_static_crypto(pair.hamiltonian, pair.metric, StateVector::Unit(pair.hamiltonian.rows(), 0),
                                 flow.times);
      if (!is_positive_definite(pair.metric)) fail(ErrorKind::MetricNotPositive, "static metric");
    } catch (const Error& e) {
      report.failures.emplace_back(kStaticDieudonne, std::string(to_string(e.kind())));
      report.status[kStaticDieudonne] = false;
    }
  }

  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ExperimentRun{std::move(seed), std::move(flow), std::move(g), std::move(physical), std::move(crypto),
                       std::move(report)};
}

// ---------------------------------------------------------------------------

OrderFit fit_order(const std::vector<double>& dts, const std::vector<double>& residuals) {
  const double floor = 1e2 * std::numeric_limits<double>::epsilon();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < dts.size() && i < residuals.size(); ++i) {
    if (residuals[i] >= floor && std::isfinite(residuals[i])) {
      pts.emplace_back(std::log(dts[i]), std::log(residuals[i]));
    }
  }
  OrderFit fit;
  fit.points = static_cast<int>(pts.size());
  if (pts.size() < 2) {
    fit.saturated = true;
    fit.order = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  fit.order = sxy / sxx;
  return fit;
}

ScanResult convergence_scan(const ModelSpec& spec, const std::vector<double>& dts) {
  if (dts.size() < 3) fail(ErrorKind::InsufficientPoints, "convergence_scan needs at least three step sizes");
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(dts[i] > 0.0)) fail(ErrorKind::ValidationError, "scan step sizes must be positive");
    if (i > 0 && !(dts[i] < dts[i - 1])) fail(ErrorKind::ValidationError, "scan step sizes must be strictly decreasing");
  }

  const DysonSeed seed = build_dyson_seed(spec.seed, spec.rng_seed, spec.family.dim(), spec.cond_bound);
  std::vector<std::future<Residuals>> jobs;
  jobs.reserve(dts.size());
  for (double dt : dts) {
    Grid grid = spec.grid;
    grid.dt = dt;
    jobs.push_back(std::async(std::launch::async, [&spec, &seed, grid] { return pipeline_residuals(spec, seed, grid); }));
  }

  ScanResult result;
  std::vector<double> g_res, x_res;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const Residuals r = jobs[i].get();
    result.rows.push_back({dts[i], r.g_constancy, r.cross_backend});
    g_res.push_back(r.g_constancy);
    x_res.push_back(r.cross_backend);
  }
  result.orders[kGConstancy] = fit_order(dts, g_res);
  result.orders[kCrossBackend] = fit_order(dts, x_res);
  return result;
}

} // namespace dyson
