#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dyson/dyson_flow.hpp"
#include "dyson/model_catalog.hpp"
#include "dyson/propagators.hpp"

namespace dyson {

// ---------------------------------------------------------------------------
// Residual checks. All are relative, normalized by max(1, ||.||).
// ---------------------------------------------------------------------------

/// max_k ||G(t_k) - G(0)||_F / max(1, ||G(0)||_F), with G(t_k) rebuilt from
/// the flow at every node.
double check_g_constancy(const HamiltonianFamily& family, const FlowTrace& flow);

/// max_k ||Theta(t_k) - exp(-i G^dagger t_k) Theta(0) exp(i G t_k)||_F / max(1, ||Theta(0)||_F)
double check_theta_evolution(const FlowTrace& flow, const OperatorMatrix& g);

/// ||H^dagger Theta - Theta H||_F / (max(1, ||H||_F) max(1, ||Theta||_2))
double check_dieudonne(const OperatorMatrix& h_f, const OperatorMatrix& theta);

struct UnitarityDrifts {
  /// max_k | ||phi(t_k)||^2 - ||phi(0)||^2 |
  double physical_norm_drift = 0.0;
  /// max_k | <Phi(t_k)|Theta(t_k)|Phi(t_k)> - <Phi(0)|Theta(0)|Phi(0)> |
  double ketket_overlap_drift = 0.0;
  /// max_k | ||Phi(t_k)||^2 - ||Phi(0)||^2 |, the plain Dirac norm. Expected
  /// to move whenever the Dyson map is not unitary.
  double dirac_norm_drift = 0.0;
};

/// `thetas` holds Theta(t_k) on the trace grid. Drifts are divided by
/// max(1, initial value).
UnitarityDrifts check_unitarity(const EvolutionTrace& trace, const std::vector<OperatorMatrix>& thetas);

/// max_k | <Phi_a(t_k)|Theta(t_k)|Phi_b(t_k)> - <phi_a(0)|phi_b(0)> |
double ketket_pair_drift(const EvolutionTrace& a, const EvolutionTrace& b, const std::vector<OperatorMatrix>& thetas);

/// max_k || phi_a(t_k) - phi_b(t_k) ||
double cross_backend_residual(const EvolutionTrace& a, const EvolutionTrace& b);

/// Theta(t_k) = Omega(t_k)^dagger Omega(t_k) for every node.
std::vector<OperatorMatrix> metric_trace(const FlowTrace& flow);

// ---------------------------------------------------------------------------
// Run reports
// ---------------------------------------------------------------------------

/// Names of the pass/fail residuals.
inline constexpr const char* kGConstancy = "g_constancy";
inline constexpr const char* kThetaIntertwine = "theta_intertwine";
inline constexpr const char* kDieudonne = "dieudonne";
inline constexpr const char* kCrossBackend = "cross_backend";
inline constexpr const char* kPhysicalNormDrift = "physical_norm_drift";
inline constexpr const char* kKetketOverlapDrift = "ketket_overlap_drift";
inline constexpr const char* kStaticDieudonne = "static_dieudonne";

/// 1e-6 for flow-dependent identities, 1e-10 for algebraic ones.
std::map<std::string, double> default_tolerances();

struct RunReport {
  std::string model;
  Grid grid;
  std::map<std::string, double> residuals;
  std::map<std::string, double> tolerances;
  std::map<std::string, bool> status;
  std::map<std::string, double> diagnostics;
  std::map<std::string, double> orders;
  /// Checks that could not be evaluated, as (check, error kind) pairs.
  std::vector<std::pair<std::string, std::string>> failures;
  double wall_time_s = 0.0;

  /// Sets residual and status together.
  void record(const std::string& name, double value);
  bool passed() const;
};

nlohmann::json to_json(const RunReport& report);

struct ExperimentRun {
  DysonSeed seed;
  FlowTrace flow;
  OperatorMatrix generator;
  EvolutionTrace physical;
  EvolutionTrace crypto;
  RunReport report;
};

/// The full pipeline for one configuration: seed, flow, constant generator,
/// both propagation backends and every residual. Numerical failures
/// propagate as Error; a failed static quasi-Hermiticity precondition is
/// recorded in the report instead.
ExperimentRun run_experiment(const ModelSpec& spec);

/// Default initial state (uniform superposition) unless the configuration sets one.
StateVector initial_state(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Convergence scans
// ---------------------------------------------------------------------------

struct ScanRow {
  double dt = 0.0;
  double g_constancy = 0.0;
  double cross_backend = 0.0;
};

struct OrderFit {
  /// NaN when saturated.
  double order = 0.0;
  bool saturated = false;
  int points = 0;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::map<std::string, OrderFit> orders;
};

/// Points below 1e2 machine epsilon are excluded from the log-log fit; a
/// series with fewer than two usable points is reported as saturated.
OrderFit fit_order(const std::vector<double>& dts, const std::vector<double>& residuals);

/// Runs the pipeline for each dt (evaluated concurrently) and fits the
/// convergence orders of g_constancy and cross_backend. InsufficientPoints
/// for fewer than three dts.
ScanResult convergence_scan(const ModelSpec& spec, const std::vector<double>& dts);

} // namespace dyson
