#include "dyson/model_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <Eigen/SVD>

#include "dyson/dyson_flow.hpp"
#include "dyson/encoding.hpp"

namespace dyson {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) { fail(ErrorKind::ValidationError, what); }

double poly_value(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double poly_derivative(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) acc = acc * t + static_cast<double>(j) * c[j];
  return acc;
}

Eigen::Index validate_family(const HamiltonianFamily::Variant& v) {
  return std::visit(
      Overloaded{
          [](const ConstantFamily& f) -> Eigen::Index {
            require_square(f.h0, "constant family matrix");
            require_finite(f.h0, "constant family matrix");
            if (!is_hermitian(f.h0, 1e-12)) invalid("constant family matrix is not Hermitian");
            return f.h0.rows();
          },
          [](const DiagonalPolyFamily& f) -> Eigen::Index {
            if (f.coefficients.empty()) invalid("diagonal-poly family needs at least one diagonal entry");
            for (const auto& c : f.coefficients) {
              for (double x : c) {
                if (!std::isfinite(x)) invalid("diagonal-poly coefficient is not finite");
              }
            }
            return static_cast<Eigen::Index>(f.coefficients.size());
          },
          [](const RabiFamily& f) -> Eigen::Index {
            if (!std::isfinite(f.epsilon) || !std::isfinite(f.coupling) || !std::isfinite(f.omega)) {
              invalid("rabi parameters must be finite");
            }
            return 2;
          },
          [](const PolyMatrixFamily& f) -> Eigen::Index {
            if (f.coefficients.empty()) invalid("poly-matrix family needs at least one coefficient");
            const Eigen::Index n = f.coefficients.front().rows();
            for (const auto& a : f.coefficients) {
              require_square(a, "poly-matrix coefficient");
              require_finite(a, "poly-matrix coefficient");
              if (a.rows() != n) invalid("poly-matrix coefficients have different dimensions");
              if (!is_hermitian(a, 1e-12)) invalid("poly-matrix coefficient is not Hermitian");
            }
            return n;
          },
      },
      v);
}

// Rescales the singular values of `a` log-linearly so that the condition
// number does not exceed `cond_max`. Returns nullopt for singular draws.
std::optional<OperatorMatrix> compress_condition(const OperatorMatrix& a, double cond_max) {
  Eigen::JacobiSVD<OperatorMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || !std::isfinite(smax)) return std::nullopt;
  const double cond = smax / smin;
  const double target = cond_max * (1.0 - 1e-9);
  if (cond > target) {
    if (!(target > 1.0)) return std::nullopt;
    const double gamma = std::log(target) / std::log(cond);
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = smax * std::pow(s(i) / smax, gamma);
  }
  return OperatorMatrix(svd.matrixU() * s.cast<Complex>().asDiagonal() * svd.matrixV().adjoint());
}

OperatorMatrix draw_unit_square(std::mt19937_64& rng, Eigen::Index dim) {
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  OperatorMatrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double re = unit(rng);
      const double im = unit(rng);
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

} // namespace

// ---------------------------------------------------------------------------

std::string_view kind_name(FamilyKind kind) noexcept {
  switch (kind) {
  case FamilyKind::Constant: return "constant";
  case FamilyKind::DiagonalPoly: return "diagonal-poly";
  case FamilyKind::Rabi: return "rabi";
  case FamilyKind::PolyMatrix: return "poly-matrix";
  }
  return "unknown";
}

FamilyKind parse_family_kind(std::string_view name) {
  for (auto k : {FamilyKind::Constant, FamilyKind::DiagonalPoly, FamilyKind::Rabi, FamilyKind::PolyMatrix}) {
    if (kind_name(k) == name) return k;
  }
  fail(ErrorKind::UnknownKind, "unregistered Hamiltonian family '" + std::string(name) + "'");
}

HamiltonianFamily::HamiltonianFamily(Variant v) : family_(std::move(v)), dim_(validate_family(family_)) {}

FamilyKind HamiltonianFamily::kind() const noexcept {
  return static_cast<FamilyKind>(family_.index());
}

OperatorMatrix eval_h(const HamiltonianFamily& family, double t) {
  if (!std::isfinite(t)) fail(ErrorKind::NonFinite, "eval_h: time is not finite");
  const Eigen::Index n = family.dim();
  return std::visit(
      Overloaded{
          [&](const ConstantFamily& f) -> OperatorMatrix { return f.h0; },
          [&](const DiagonalPolyFamily& f) -> OperatorMatrix {
            OperatorMatrix h = OperatorMatrix::Zero(n, n);
            for (Eigen::Index k = 0; k < n; ++k) h(k, k) = poly_value(f.coefficients[static_cast<std::size_t>(k)], t);
            return h;
          },
          [&](const RabiFamily& f) -> OperatorMatrix {
            const double off = f.coupling * std::cos(f.omega * t);
            OperatorMatrix h(2, 2);
            h << f.epsilon, off, off, -f.epsilon;
            return h;
          },
          [&](const PolyMatrixFamily& f) -> OperatorMatrix {
            OperatorMatrix h = OperatorMatrix::Zero(n, n);
            for (auto it = f.coefficients.rbegin(); it != f.coefficients.rend(); ++it) h = h * t + *it;
            return h;
          },
      },
      family.variant());
}

OperatorMatrix eval_hdot(const HamiltonianFamily& family, double t) {
  if (!std::isfinite(t)) fail(ErrorKind::NonFinite, "eval_hdot: time is not finite");
  const Eigen::Index n = family.dim();
  return std::visit(
      Overloaded{
          [&](const ConstantFamily&) -> OperatorMatrix { return OperatorMatrix::Zero(n, n); },
          [&](const DiagonalPolyFamily& f) -> OperatorMatrix {
            OperatorMatrix h = OperatorMatrix::Zero(n, n);
            for (Eigen::Index k = 0; k < n; ++k) {
              h(k, k) = poly_derivative(f.coefficients[static_cast<std::size_t>(k)], t);
            }
            return h;
          },
          [&](const RabiFamily& f) -> OperatorMatrix {
            const double off = -f.coupling * f.omega * std::sin(f.omega * t);
            OperatorMatrix h = OperatorMatrix::Zero(2, 2);
            h(0, 1) = off;
            h(1, 0) = off;
            return h;
          },
          [&](const PolyMatrixFamily& f) -> OperatorMatrix {
            OperatorMatrix h = OperatorMatrix::Zero(n, n);
            for (std::size_t j = f.coefficients.size(); j-- > 1;) {
              h = h * t + static_cast<double>(j) * f.coefficients[j];
            }
            return h;
          },
      },
      family.variant());
}

// ---------------------------------------------------------------------------

std::string_view recipe_name(const SeedRecipe& recipe) noexcept {
  switch (recipe.index()) {
  case 0: return "identity";
  case 1: return "scalar";
  case 2: return "random";
  default: return "explicit";
  }
}

DysonSeed build_dyson_seed(const SeedRecipe& recipe, std::uint64_t rng_seed, Eigen::Index dim,
                           double cond_bound) {
  if (dim <= 0) invalid("seed dimension must be positive");
  const OperatorMatrix ident = OperatorMatrix::Identity(dim, dim);

  return std::visit(
      Overloaded{
          [&](const IdentitySeed&) {
            return DysonSeed{ident, OperatorMatrix::Zero(dim, dim)};
          },
          [&](const ScalarSeed& r) {
            if (!std::isfinite(r.s.real()) || !std::isfinite(r.s.imag())) {
              fail(ErrorKind::NonFinite, "scalar seed is not finite");
            }
            return DysonSeed{ident, r.s * ident};
          },
          [&](const RandomSeed& r) {
            std::mt19937_64 rng(rng_seed);
            const double bound = std::min(r.cond_max, cond_bound);
            for (int attempt = 0; attempt < 100; ++attempt) {
              const OperatorMatrix draw = draw_unit_square(rng, dim);
              auto omega0 = compress_condition(draw, bound);
              if (!omega0 || condition_number(*omega0) > bound) continue;
              OperatorMatrix sigma0 = draw_unit_square(rng, dim);
              return DysonSeed{std::move(*omega0), std::move(sigma0)};
            }
            fail(ErrorKind::CondBoundViolated,
                 "no random Omega(0) with cond <= " + std::to_string(bound) + " in 100 attempts");
          },
          [&](const ExplicitSeed& r) {
            if (r.omega0.rows() != dim || r.omega0.cols() != dim) {
              fail(ErrorKind::BadExplicitMatrix, "explicit Omega(0) has the wrong dimension");
            }
            try {
              (void)inverse(r.omega0);
            } catch (const Error& e) {
              fail(ErrorKind::BadExplicitMatrix, std::string("explicit Omega(0) is singular (") + e.what() + ")");
            }
            if (condition_number(r.omega0) > cond_bound) {
              fail(ErrorKind::BadExplicitMatrix, "explicit Omega(0) exceeds the condition bound");
            }
            OperatorMatrix sigma0;
            if (r.sigma0) {
              sigma0 = *r.sigma0;
            } else if (r.omega_delta) {
              sigma0 = sigma_from_omegadot(r.omega0, estimate_omegadot_fd(r.omega0, *r.omega_delta, r.delta));
            } else {
              sigma0 = OperatorMatrix::Zero(dim, dim);
            }
            if (sigma0.rows() != dim || sigma0.cols() != dim) {
              fail(ErrorKind::BadExplicitMatrix, "explicit sigma(0) has the wrong dimension");
            }
            require_finite(sigma0, "explicit sigma(0)");
            return DysonSeed{r.omega0, std::move(sigma0)};
          },
      },
      recipe);
}

// ---------------------------------------------------------------------------
// Configuration documents
// ---------------------------------------------------------------------------

namespace {

using encoding::Json;

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class Section {
public:
  Section(const Json& j, std::string path, const ParseOptions& opts, std::vector<std::string>& warnings)
      : j_(j), path_(std::move(path)), opts_(opts), warnings_(warnings) {
    if (!j_.is_object()) invalid(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const Json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) invalid(where(key) + ": missing required field");
    return j_.at(key);
  }

  std::string where(const std::string& key) const { return path_ + "/" + key; }

  double real(const std::string& key) { return encoding::decode_real(at(key), where(key)); }

  double real_or(const std::string& key, double fallback) {
    return has(key) ? encoding::decode_real(j_.at(key), where(key)) : fallback;
  }

  std::string string(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) invalid(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  Section child(const std::string& key) { return Section(at(key), where(key), opts_, warnings_); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (seen_.count(key)) continue;
      const std::string msg = where(key) + ": unknown key";
      if (!opts_.lenient) invalid(msg);
      warnings_.push_back(msg);
    }
  }

private:
  const Json& j_;
  std::string path_;
  const ParseOptions& opts_;
  std::vector<std::string>& warnings_;
  std::set<std::string> seen_;
};

std::uint64_t read_u64(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    invalid(where + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

HamiltonianFamily parse_family(Section& model) {
  const std::string kind_str = model.string("kind");
  const FamilyKind kind = parse_family_kind(kind_str);
  const Json& dim_json = model.at("dim");
  if (!dim_json.is_number_integer() || dim_json.get<std::int64_t>() <= 0) {
    invalid(model.where("dim") + ": expected a positive integer");
  }
  const auto dim = static_cast<Eigen::Index>(dim_json.get<std::int64_t>());

  auto family = [&]() -> HamiltonianFamily {
    switch (kind) {
    case FamilyKind::Constant:
      return HamiltonianFamily(ConstantFamily{encoding::decode_matrix(model.at("matrix"), model.where("matrix"))});
    case FamilyKind::DiagonalPoly: {
      const Json& c = model.at("coefficients");
      if (!c.is_array()) invalid(model.where("coefficients") + ": expected an array of arrays");
      DiagonalPolyFamily f;
      for (std::size_t k = 0; k < c.size(); ++k) {
        const std::string w = model.where("coefficients") + "/" + std::to_string(k);
        if (!c[k].is_array()) invalid(w + ": expected an array of real coefficients");
        std::vector<double> row;
        for (std::size_t j = 0; j < c[k].size(); ++j) row.push_back(encoding::decode_real(c[k][j], w + "/" + std::to_string(j)));
        f.coefficients.push_back(std::move(row));
      }
      return HamiltonianFamily(std::move(f));
    }
    case FamilyKind::Rabi: {
      RabiFamily f;
      if (model.has("params")) {
        Section params = model.child("params");
        f.epsilon = params.real("epsilon");
        f.coupling = params.real("coupling");
        f.omega = params.real("omega");
        params.finish();
      }
      return HamiltonianFamily(f);
    }
    case FamilyKind::PolyMatrix: {
      const Json& c = model.at("coefficients");
      if (!c.is_array() || c.empty()) invalid(model.where("coefficients") + ": expected an array of matrices");
      PolyMatrixFamily f;
      for (std::size_t j = 0; j < c.size(); ++j) {
        f.coefficients.push_back(encoding::decode_matrix(c[j], model.where("coefficients") + "/" + std::to_string(j)));
      }
      return HamiltonianFamily(std::move(f));
    }
    }
    fail(ErrorKind::UnknownKind, kind_str);
  }();

  if (family.dim() != dim) {
    invalid(model.where("dim") + ": declared dim " + std::to_string(dim) + " but the family has dim " +
            std::to_string(family.dim()));
  }
  return family;
}

SeedRecipe parse_seed(Section& seed) {
  const std::string recipe = seed.has("recipe") ? seed.string("recipe") : "identity";
  if (recipe == "identity") return IdentitySeed{};
  if (recipe == "scalar") return ScalarSeed{encoding::decode_complex(seed.at("s"), seed.where("s"))};
  if (recipe == "random") return RandomSeed{seed.real_or("cond_max", 50.0)};
  if (recipe == "explicit") {
    ExplicitSeed e;
    e.omega0 = encoding::decode_matrix(seed.at("omega0"), seed.where("omega0"));
    if (seed.has("sigma0")) e.sigma0 = encoding::decode_matrix(seed.at("sigma0"), seed.where("sigma0"));
    if (seed.has("omega_delta")) {
      if (e.sigma0) invalid(seed.where("omega_delta") + ": give either sigma0 or omega_delta, not both");
      e.omega_delta = encoding::decode_matrix(seed.at("omega_delta"), seed.where("omega_delta"));
      e.delta = seed.real("delta");
    }
    return e;
  }
  invalid(seed.where("recipe") + ": unknown seed recipe '" + recipe + "'");
}

void require_desk_scale(const OperatorMatrix& a, const std::string& where) {
  if (!(frobenius(a) <= kMaxOperatorNorm)) {
    invalid(where + ": Frobenius norm exceeds " + std::to_string(kMaxOperatorNorm));
  }
}

} // namespace

void validate(const ModelSpec& spec) {
  const Eigen::Index n = spec.family.dim();
  if (n > kMaxDim) invalid("/model/dim: must be at most " + std::to_string(kMaxDim));
  std::visit(Overloaded{
                 [&](const ConstantFamily& f) { require_desk_scale(f.h0, "/model/matrix"); },
                 [&](const DiagonalPolyFamily& f) {
                   std::size_t degree = 0;
                   for (const auto& row : f.coefficients) degree = std::max(degree, row.size());
                   for (std::size_t p = 0; p < degree; ++p) {
                     OperatorMatrix d = OperatorMatrix::Zero(n, n);
                     for (Eigen::Index j = 0; j < n; ++j) {
                       const auto& row = f.coefficients[static_cast<std::size_t>(j)];
                       if (p < row.size()) d(j, j) = row[p];
                     }
                     require_desk_scale(d, "/model/coefficients/" + std::to_string(p));
                   }
                 },
                 [&](const RabiFamily&) { require_desk_scale(eval_h(spec.family, 0.0), "/model/params"); },
                 [&](const PolyMatrixFamily& f) {
                   for (std::size_t p = 0; p < f.coefficients.size(); ++p) {
                     require_desk_scale(f.coefficients[p], "/model/coefficients/" + std::to_string(p));
                   }
                 },
             },
             spec.family.variant());
  if (!(spec.grid.dt > 0.0) || !std::isfinite(spec.grid.dt)) invalid("/grid/dt: must be positive");
  if (!(spec.grid.t_final > 0.0) || !std::isfinite(spec.grid.t_final)) invalid("/grid/t_final: must be positive");
  if (!(spec.grid.dt < spec.grid.t_final)) invalid("/grid/dt: must be smaller than t_final");
  if (!(spec.cond_bound >= 1.0)) invalid("/seed/cond_bound: must be >= 1");
  if (spec.output.format != "records" && spec.output.format != "table") {
    invalid("/output/format: expected 'records' or 'table'");
  }
  if (spec.output.initial_state && spec.output.initial_state->size() != n) {
    invalid("/output/initial_state: dimension mismatch with the model");
  }
  for (const auto& [name, tol] : spec.output.tolerances) {
    if (!(tol >= 0.0)) invalid("/output/tolerances/" + name + ": must be non-negative");
  }
  for (std::size_t i = 1; i < spec.output.scan_dts.size(); ++i) {
    if (!(spec.output.scan_dts[i] < spec.output.scan_dts[i - 1])) {
      invalid("/output/scan_dts: must be strictly decreasing");
    }
  }
  for (double dt : spec.output.scan_dts) {
    if (!(dt > 0.0)) invalid("/output/scan_dts: entries must be positive");
  }
  if (const auto* r = std::get_if<RandomSeed>(&spec.seed); r && !(r->cond_max >= 1.0)) {
    invalid("/seed/cond_max: must be >= 1");
  }
  if (const auto* e = std::get_if<ExplicitSeed>(&spec.seed)) {
    if (e->omega0.rows() != n || e->omega0.cols() != n) invalid("/seed/omega0: dimension mismatch with the model");
    if (e->sigma0 && (e->sigma0->rows() != n || e->sigma0->cols() != n)) {
      invalid("/seed/sigma0: dimension mismatch with the model");
    }
    if (e->omega_delta && (e->omega_delta->rows() != n || e->omega_delta->cols() != n)) {
      invalid("/seed/omega_delta: dimension mismatch with the model");
    }
    if (e->omega_delta && !(e->delta > 0.0)) invalid("/seed/delta: must be positive");
    require_desk_scale(e->omega0, "/seed/omega0");
    if (e->sigma0) require_desk_scale(*e->sigma0, "/seed/sigma0");
  }
  if (spec.static_pair) {
    const auto& p = *spec.static_pair;
    if (p.hamiltonian.rows() != p.hamiltonian.cols() || p.metric.rows() != p.metric.cols() ||
        p.hamiltonian.rows() != p.metric.rows()) {
      invalid("/model/static_check: hamiltonian and metric must be square of equal dimension");
    }
    require_desk_scale(p.hamiltonian, "/model/static_check/hamiltonian");
    require_desk_scale(p.metric, "/model/static_check/metric");
  }
}

ModelSpec parse_model_config(std::string_view text, const ParseOptions& options) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::ParseError, e.what());
  }

  std::vector<std::string> warnings;
  Section root(doc, "", options, warnings);

  Section model = root.child("model");
  HamiltonianFamily family = parse_family(model);
  std::optional<StaticPair> static_pair;
  if (model.has("static_check")) {
    Section sc = model.child("static_check");
    static_pair = StaticPair{encoding::decode_matrix(sc.at("hamiltonian"), sc.where("hamiltonian")),
                             encoding::decode_matrix(sc.at("metric"), sc.where("metric"))};
    sc.finish();
  }
  model.finish();

  ModelSpec spec{.name = std::string(kind_name(family.kind())),
                 .family = std::move(family),
                 .seed = IdentitySeed{},
                 .static_pair = std::move(static_pair)};

  if (root.has("name")) spec.name = root.string("name");

  if (root.has("seed")) {
    Section seed = root.child("seed");
    spec.seed = parse_seed(seed);
    if (seed.has("rng_seed")) spec.rng_seed = read_u64(seed.at("rng_seed"), seed.where("rng_seed"));
    spec.cond_bound = seed.real_or("cond_bound", kDefaultCondBound);
    seed.finish();
  }

  if (root.has("grid")) {
    Section grid = root.child("grid");
    spec.grid.t_final = grid.real_or("t_final", spec.grid.t_final);
    spec.grid.dt = grid.real_or("dt", spec.grid.dt);
    grid.finish();
  }

  if (root.has("output")) {
    Section out = root.child("output");
    if (out.has("format")) spec.output.format = out.string("format");
    if (out.has("directory")) spec.output.directory = out.string("directory");
    if (out.has("initial_state")) {
      spec.output.initial_state = encoding::decode_state(out.at("initial_state"), out.where("initial_state"));
    }
    if (out.has("tolerances")) {
      const Json& tols = out.at("tolerances");
      if (!tols.is_object()) invalid(out.where("tolerances") + ": expected an object");
      for (const auto& [k, v] : tols.items()) {
        spec.output.tolerances[k] = encoding::decode_real(v, out.where("tolerances") + "/" + k);
      }
    }
    if (out.has("scan_dts")) {
      const Json& dts = out.at("scan_dts");
      if (!dts.is_array()) invalid(out.where("scan_dts") + ": expected an array");
      for (std::size_t i = 0; i < dts.size(); ++i) {
        spec.output.scan_dts.push_back(encoding::decode_real(dts[i], out.where("scan_dts") + "/" + std::to_string(i)));
      }
    }
    out.finish();
  }

  root.finish();
  spec.warnings = std::move(warnings);
  validate(spec);
  return spec;
}

std::string serialize_model_config(const ModelSpec& spec) {
  Json model;
  model["kind"] = std::string(kind_name(spec.family.kind()));
  model["dim"] = spec.family.dim();
  std::visit(Overloaded{
                 [&](const ConstantFamily& f) { model["matrix"] = encoding::encode(f.h0); },
                 [&](const DiagonalPolyFamily& f) { model["coefficients"] = f.coefficients; },
                 [&](const RabiFamily& f) {
                   model["params"] = {{"epsilon", f.epsilon}, {"coupling", f.coupling}, {"omega", f.omega}};
                 },
                 [&](const PolyMatrixFamily& f) {
                   Json c = Json::array();
                   for (const auto& a : f.coefficients) c.push_back(encoding::encode(a));
                   model["coefficients"] = std::move(c);
                 },
             },
             spec.family.variant());
  if (spec.static_pair) {
    model["static_check"] = {{"hamiltonian", encoding::encode(spec.static_pair->hamiltonian)},
                             {"metric", encoding::encode(spec.static_pair->metric)}};
  }

  Json seed;
  seed["recipe"] = std::string(recipe_name(spec.seed));
  std::visit(Overloaded{
                 [](const IdentitySeed&) {},
                 [&](const ScalarSeed& r) { seed["s"] = encoding::encode(r.s); },
                 [&](const RandomSeed& r) { seed["cond_max"] = r.cond_max; },
                 [&](const ExplicitSeed& r) {
                   seed["omega0"] = encoding::encode(r.omega0);
                   if (r.sigma0) seed["sigma0"] = encoding::encode(*r.sigma0);
                   if (r.omega_delta) {
                     seed["omega_delta"] = encoding::encode(*r.omega_delta);
                     seed["delta"] = r.delta;
                   }
                 },
             },
             spec.seed);
  seed["rng_seed"] = spec.rng_seed;
  seed["cond_bound"] = spec.cond_bound;

  Json output;
  output["format"] = spec.output.format;
  if (spec.output.directory) output["directory"] = *spec.output.directory;
  if (spec.output.initial_state) output["initial_state"] = encoding::encode(*spec.output.initial_state);
  output["tolerances"] = Json::object();
  for (const auto& [k, v] : spec.output.tolerances) output["tolerances"][k] = v;
  output["scan_dts"] = spec.output.scan_dts;

  Json doc;
  doc["name"] = spec.name;
  doc["model"] = std::move(model);
  doc["seed"] = std::move(seed);
  doc["grid"] = {{"t_final", spec.grid.t_final}, {"dt", spec.grid.dt}};
  doc["output"] = std::move(output);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

namespace {

bool same(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same(const std::optional<OperatorMatrix>& a, const std::optional<OperatorMatrix>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same(*a, *b);
}

bool same_family(const HamiltonianFamily& a, const HamiltonianFamily& b) {
  if (a.kind() != b.kind()) return false;
  return std::visit(
      Overloaded{
          [&](const ConstantFamily& f) { return same(f.h0, std::get<ConstantFamily>(b.variant()).h0); },
          [&](const DiagonalPolyFamily& f) {
            return f.coefficients == std::get<DiagonalPolyFamily>(b.variant()).coefficients;
          },
          [&](const RabiFamily& f) {
            const auto& g = std::get<RabiFamily>(b.variant());
            return f.epsilon == g.epsilon && f.coupling == g.coupling && f.omega == g.omega;
          },
          [&](const PolyMatrixFamily& f) {
            const auto& g = std::get<PolyMatrixFamily>(b.variant());
            if (f.coefficients.size() != g.coefficients.size()) return false;
            for (std::size_t j = 0; j < f.coefficients.size(); ++j) {
              if (!same(f.coefficients[j], g.coefficients[j])) return false;
            }
            return true;
          },
      },
      a.variant());
}

bool same_seed(const SeedRecipe& a, const SeedRecipe& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      Overloaded{
          [](const IdentitySeed&) { return true; },
          [&](const ScalarSeed& r) { return r.s == std::get<ScalarSeed>(b).s; },
          [&](const RandomSeed& r) { return r.cond_max == std::get<RandomSeed>(b).cond_max; },
          [&](const ExplicitSeed& r) {
            const auto& q = std::get<ExplicitSeed>(b);
            return same(r.omega0, q.omega0) && same(r.sigma0, q.sigma0) && same(r.omega_delta, q.omega_delta) &&
                   r.delta == q.delta;
          },
      },
      a);
}

} // namespace

bool operator==(const ModelSpec& a, const ModelSpec& b) {
  if (a.name != b.name || !same_family(a.family, b.family) || !same_seed(a.seed, b.seed)) return false;
  if (a.rng_seed != b.rng_seed || a.cond_bound != b.cond_bound) return false;
  if (a.grid.t_final != b.grid.t_final || a.grid.dt != b.grid.dt) return false;
  const auto& oa = a.output;
  const auto& ob = b.output;
  if (oa.format != ob.format || oa.directory != ob.directory || oa.tolerances != ob.tolerances ||
      oa.scan_dts != ob.scan_dts) {
    return false;
  }
  if (oa.initial_state.has_value() != ob.initial_state.has_value()) return false;
  if (oa.initial_state && (oa.initial_state->size() != ob.initial_state->size() ||
                           *oa.initial_state != *ob.initial_state)) {
    return false;
  }
  if (a.static_pair.has_value() != b.static_pair.has_value()) return false;
  if (a.static_pair && (!same(a.static_pair->hamiltonian, b.static_pair->hamiltonian) ||
                        !same(a.static_pair->metric, b.static_pair->metric))) {
    return false;
  }
  return true;
}

} // namespace dyson
