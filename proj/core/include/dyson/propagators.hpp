#pragma once

#include <vector>

#include "dyson/dyson_flow.hpp"
#include "dyson/model_catalog.hpp"
#include "dyson/operator_core.hpp"

namespace dyson {

/// One state seen in the three pictures at a common time:
///   phi           physical ket
///   phi_friendly  Phi = Omega^-1 phi
///   phi_ketket    Phi>> = Omega^dagger phi = Theta Phi
struct StateTriple {
  StateVector phi;
  StateVector phi_friendly;
  StateVector phi_ketket;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<StateTriple> states;
  /// ||Phi||^2, the plain Dirac norm of the friendly ket.
  std::vector<double> dirac_norm;
  /// Re <<Phi|Phi>, the norm in the metric picture.
  std::vector<double> physical_norm;

  std::size_t size() const noexcept { return times.size(); }
};

StateTriple map_states(const StateVector& phi, const OperatorMatrix& omega);

/// RK4 solution of i d/dt phi = h(t) phi. The triples use the trivial map
/// Omega = I; see reframe() to attach a Dyson flow.
EvolutionTrace evolve_physical(const HamiltonianFamily& family, const StateVector& phi0, const Grid& grid);

/// Recomputes the friendly and ketket components of `trace` with the Dyson
/// map sampled by `flow` on the same grid.
EvolutionTrace reframe(const EvolutionTrace& trace, const FlowTrace& flow);

/// Closed-form evolution Phi(t_k) = exp(-i G t_k) Phi(0), Phi(0) = Omega(0)^-1 phi0,
/// with reconstruction phi(t_k) = Omega(t_k) Phi(t_k) and the ketket from
/// exp(-i G^dagger t_k) Theta(0) Phi(0).
EvolutionTrace evolve_cryptounitary(const OperatorMatrix& g, const FlowTrace& flow, const StateVector& phi0);

/// Phi>>(t_k) = exp(-i G^dagger t_k) Theta(0) Phi(0). MetricNotPositive
/// unless theta0 is Hermitian positive definite.
std::vector<StateVector> evolve_ketket(const OperatorMatrix& g, const OperatorMatrix& theta0,
                                       const StateVector& phi_friendly0, const std::vector<double>& times);

/// <Phi_1| Theta |Phi_2>
Complex physical_inner(const StateVector& phi_friendly1, const StateVector& phi_friendly2,
                       const OperatorMatrix& theta);

/// The metric-dependent conjugation |Phi> -> <Phi| Theta.
Covector theta_bra(const StateVector& phi_friendly, const OperatorMatrix& theta);

struct OverlapPair {
  Complex lhs;
  Complex rhs;
};

/// lhs = (e^{-iHt} Phi_1)^dagger (e^{-iHt} Phi_2) evaluated directly,
/// rhs = Phi_1^dagger e^{i(H^dagger - H)t} Phi_2. The two coincide for
/// normal H only; callers compare them rather than assume equality.
OverlapPair static_overlap_drift(const OperatorMatrix& h_f, const StateVector& phi1, const StateVector& phi2,
                                 double t);

/// Phi(t) = exp(-i H t) Phi(0) for a time-independent quasi-Hermitian H.
/// NotQuasiHermitian unless ||H^dagger Theta - Theta H||_F <= 1e-8 max(1, ||Theta||_F).
std::vector<StateVector> evolve_static_crypto(const OperatorMatrix& h_f, const OperatorMatrix& theta,
                                              const StateVector& phi_friendly0, const std::vector<double>& times);

} // namespace dyson
