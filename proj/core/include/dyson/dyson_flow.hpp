#pragma once

#include <cstddef>
#include <vector>

#include "dyson/model_catalog.hpp"
#include "dyson/operator_core.hpp"

namespace dyson {

/// Samples of the coupled flow (sigma(t), Omega(t)) on a uniform grid with
/// times[0] = 0. Node 0 holds the seed.
struct FlowTrace {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<OperatorMatrix> sigma;
  std::vector<OperatorMatrix> omega;

  std::size_t size() const noexcept { return times.size(); }
};

bool operator==(const FlowTrace& a, const FlowTrace& b);

/// Instantaneous picture at one node:
///   H = Omega^-1 h Omega, Sigma = Omega^-1 sigma Omega, Theta = Omega^dagger Omega,
///   G = H - Sigma.
struct DerivedOperators {
  OperatorMatrix H;
  OperatorMatrix Sigma;
  OperatorMatrix Theta;
  OperatorMatrix G;
};

/// Uniform time grid: n = round(t_final / dt) steps of t_final / n.
std::vector<double> make_time_grid(const Grid& grid);

/// Forward difference [Omega(delta) - Omega(0)] / delta. DegenerateStep for delta <= 0.
OperatorMatrix estimate_omegadot_fd(const OperatorMatrix& omega0, const OperatorMatrix& omega_delta, double delta);

/// sigma(0) = i dOmega/dt(0) Omega(0)^-1, so that i dOmega/dt = sigma Omega at t = 0.
OperatorMatrix sigma_from_omegadot(const OperatorMatrix& omega0, const OperatorMatrix& omegadot0);

/// d sigma/dt = dh/dt - i (h sigma - sigma h)
OperatorMatrix sigma_rhs(const OperatorMatrix& h, const OperatorMatrix& hdot, const OperatorMatrix& sigma);

/// d Omega/dt = -i sigma Omega
OperatorMatrix omega_rhs(const OperatorMatrix& sigma, const OperatorMatrix& omega);

inline constexpr double kMaxDysonCondition = 1e12;

/// Classical fixed-step RK4 on the stacked system (sigma, Omega). Throws
/// IllConditionedDyson as soon as cond(Omega(t_k)) exceeds 1e12 and
/// NonFinite on overflow.
FlowTrace integrate_flow(const HamiltonianFamily& family, const DysonSeed& seed, const Grid& grid);

DerivedOperators derived_operators(const HamiltonianFamily& family, const FlowTrace& flow, std::size_t node);

/// Time-independent generator assembled from the seed,
///   G = Omega(0)^-1 (h(0) - sigma(0)) Omega(0).
OperatorMatrix generator_g0(const OperatorMatrix& h0, const DysonSeed& seed);

/// The same generator through dOmega/dt(0):
///   G = Omega^-1 h Omega - i Omega^-1 dOmega/dt.
OperatorMatrix generator_from_omegadot(const OperatorMatrix& h0, const OperatorMatrix& omega0,
                                       const OperatorMatrix& omegadot0);

} // namespace dyson
