#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dyson/operator_core.hpp"

namespace dyson {

// ---------------------------------------------------------------------------
// Hamiltonian families t -> (h(t), dh/dt)
// ---------------------------------------------------------------------------

/// h(t) = h0 for all t.
struct ConstantFamily {
  OperatorMatrix h0;
};

/// h(t) = diag(f_1(t), ..., f_n(t)), f_k(t) = sum_j coefficients[k][j] t^j.
struct DiagonalPolyFamily {
  std::vector<std::vector<double>> coefficients;
};

/// Driven two-level system
///   h(t) = [[eps, v cos(w t)], [v cos(w t), -eps]].
struct RabiFamily {
  double epsilon = 1.0;
  double coupling = 0.5;
  double omega = 2.0;
};

/// h(t) = sum_j coefficients[j] t^j with every coefficient Hermitian.
struct PolyMatrixFamily {
  std::vector<OperatorMatrix> coefficients;
};

enum class FamilyKind { Constant, DiagonalPoly, Rabi, PolyMatrix };

std::string_view kind_name(FamilyKind kind) noexcept;
/// Throws UnknownKind for names outside the catalog.
FamilyKind parse_family_kind(std::string_view name);

class HamiltonianFamily {
public:
  using Variant = std::variant<ConstantFamily, DiagonalPolyFamily, RabiFamily, PolyMatrixFamily>;

  /// Validates the family: consistent dimensions, Hermitian coefficients,
  /// finite parameters. Throws ValidationError otherwise.
  explicit HamiltonianFamily(Variant v);

  Eigen::Index dim() const noexcept { return dim_; }
  FamilyKind kind() const noexcept;
  const Variant& variant() const noexcept { return family_; }

private:
  Variant family_;
  Eigen::Index dim_ = 0;
};

OperatorMatrix eval_h(const HamiltonianFamily& family, double t);
/// Exact analytic time derivative of eval_h.
OperatorMatrix eval_hdot(const HamiltonianFamily& family, double t);

// ---------------------------------------------------------------------------
// Dyson-map seeds (Omega(0), sigma(0))
// ---------------------------------------------------------------------------

struct DysonSeed {
  OperatorMatrix omega0;
  OperatorMatrix sigma0;
};

struct IdentitySeed {};

/// Omega(0) = I, sigma(0) = s I.
struct ScalarSeed {
  Complex s;
};

/// Omega(0) and sigma(0) drawn from the centred complex unit square,
/// Omega(0) rescaled to cond <= cond_max.
struct RandomSeed {
  double cond_max = 50.0;
};

/// User-supplied Omega(0) together with either sigma(0) or a second sample
/// Omega(delta) from which dOmega/dt(0) is estimated by forward difference.
struct ExplicitSeed {
  OperatorMatrix omega0;
  std::optional<OperatorMatrix> sigma0;
  std::optional<OperatorMatrix> omega_delta;
  double delta = 0.0;
};

using SeedRecipe = std::variant<IdentitySeed, ScalarSeed, RandomSeed, ExplicitSeed>;

std::string_view recipe_name(const SeedRecipe& recipe) noexcept;

inline constexpr double kDefaultCondBound = 1e6;

/// Pure function of (recipe, rng_seed, dim). Throws CondBoundViolated when
/// 100 random draws cannot meet the bound and BadExplicitMatrix when an
/// explicit Omega(0) is singular, mis-sized or too ill-conditioned.
DysonSeed build_dyson_seed(const SeedRecipe& recipe, std::uint64_t rng_seed, Eigen::Index dim,
                           double cond_bound = kDefaultCondBound);

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct Grid {
  double t_final = 1.0;
  double dt = 1e-3;
};

/// A time-independent (H, Theta) pair checked against the quasi-Hermiticity
/// relation H^dagger Theta = Theta H.
struct StaticPair {
  OperatorMatrix hamiltonian;
  OperatorMatrix metric;
};

struct OutputOptions {
  std::string format = "records";
  std::optional<std::string> directory;
  std::optional<StateVector> initial_state;
  std::map<std::string, double> tolerances;
  std::vector<double> scan_dts;
};

struct ModelSpec {
  std::string name;
  HamiltonianFamily family;
  SeedRecipe seed;
  std::uint64_t rng_seed = 0;
  double cond_bound = kDefaultCondBound;
  Grid grid{};
  OutputOptions output{};
  std::optional<StaticPair> static_pair;
  /// Lenient-mode diagnostics (unknown keys). Not part of the serialized form.
  std::vector<std::string> warnings{};
};

bool operator==(const ModelSpec& a, const ModelSpec& b);

struct ParseOptions {
  /// Unknown keys become warnings instead of a ValidationError.
  bool lenient = false;
};

/// Parses a JSON configuration with sections `model`, `seed`, `grid`,
/// `output`. ParseError carries line/column, ValidationError the field path.
ModelSpec parse_model_config(std::string_view text, const ParseOptions& options = {});
std::string serialize_model_config(const ModelSpec& spec);

/// Checks the cross-field invariants (dt < t_final, matching dims, ...).
void validate(const ModelSpec& spec);

} // namespace dyson
