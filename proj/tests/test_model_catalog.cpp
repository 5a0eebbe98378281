#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "dyson/model_catalog.hpp"
#include "test_support.hpp"

using namespace dyson;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::IoError;
}

std::vector<HamiltonianFamily> sample_families() {
  std::mt19937_64 rng(99);
  std::vector<HamiltonianFamily> out;
  out.emplace_back(ConstantFamily{dyson::testing::random_hermitian(rng, 3)});
  out.emplace_back(DiagonalPolyFamily{{{0.5, 1.0}, {-0.2, 0.0, 0.3}, {1.0, -0.5, 0.0, 0.2}}});
  out.emplace_back(RabiFamily{1.0, 0.5, 2.0});
  out.emplace_back(PolyMatrixFamily{{dyson::testing::random_hermitian(rng, 4), dyson::testing::random_hermitian(rng, 4),
                                     dyson::testing::random_hermitian(rng, 4, 0.3)}});
  return out;
}

} // namespace

TEST_CASE("eval_h on the catalog examples") {
  OperatorMatrix h0(2, 2);
  h0 << 1.0, Complex(0.0, 0.5), Complex(0.0, -0.5), -2.0;
  const HamiltonianFamily constant(ConstantFamily{h0});
  CHECK((eval_h(constant, 3.7) - h0).norm() == 0.0);
  CHECK(eval_hdot(constant, 3.7).norm() == 0.0);

  const HamiltonianFamily rabi(RabiFamily{1.0, 0.5, 2.0});
  OperatorMatrix expected(2, 2);
  expected << 1.0, 0.5, 0.5, -1.0;
  CHECK((eval_h(rabi, 0.0) - expected).norm() == 0.0);
  CHECK(eval_hdot(rabi, 0.0).norm() == 0.0);

  const HamiltonianFamily diag(DiagonalPolyFamily{{{0.0, 1.0}, {0.0, 0.0, 1.0}}});
  OperatorMatrix d2 = OperatorMatrix::Zero(2, 2);
  d2.diagonal() << 2.0, 4.0;
  CHECK((eval_h(diag, 2.0) - d2).norm() == 0.0);
  OperatorMatrix dd2 = OperatorMatrix::Zero(2, 2);
  dd2.diagonal() << 1.0, 4.0;
  CHECK((eval_hdot(diag, 2.0) - dd2).norm() == 0.0);
}

TEST_CASE("every catalog family is Hermitian on a sampled grid") {
  for (const auto& family : sample_families()) {
    for (int k = 0; k <= 100; ++k) {
      const double t = k / 100.0;
      CHECK(is_hermitian(eval_h(family, t), 1e-12));
      CHECK(is_hermitian(eval_hdot(family, t), 1e-12));
    }
  }
}

TEST_CASE("eval_hdot matches central differences") {
  const double delta = 1e-5;
  for (const auto& family : sample_families()) {
    for (int k = 0; k <= 50; ++k) {
      const double t = k / 50.0;
      const OperatorMatrix fd = (eval_h(family, t + delta) - eval_h(family, t - delta)) / (2.0 * delta);
      CHECK((eval_hdot(family, t) - fd).norm() <= 1e-8);
    }
  }
}

TEST_CASE("family validation") {
  OperatorMatrix nonherm(2, 2);
  nonherm << 0.0, 1.0, 0.0, 0.0;
  CHECK(kind_of([&] { HamiltonianFamily f(ConstantFamily{nonherm}); }) == ErrorKind::ValidationError);
  CHECK(kind_of([] { parse_family_kind("cubic"); }) == ErrorKind::UnknownKind);
  CHECK(parse_family_kind("poly-matrix") == FamilyKind::PolyMatrix);
}

TEST_CASE("build_dyson_seed recipes") {
  const DysonSeed id = build_dyson_seed(IdentitySeed{}, 0, 3);
  CHECK((id.omega0 - OperatorMatrix::Identity(3, 3)).norm() == 0.0);
  CHECK(id.sigma0.norm() == 0.0);

  const DysonSeed sc = build_dyson_seed(ScalarSeed{Complex(0.0, 0.3)}, 0, 3);
  CHECK((sc.omega0 - OperatorMatrix::Identity(3, 3)).norm() == 0.0);
  CHECK((sc.sigma0 - Complex(0.0, 0.3) * OperatorMatrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("random seeds are deterministic and meet the condition bound") {
  const DysonSeed a = build_dyson_seed(RandomSeed{50.0}, 7, 4);
  const DysonSeed b = build_dyson_seed(RandomSeed{50.0}, 7, 4);
  CHECK((a.omega0 - b.omega0).norm() == 0.0);
  CHECK((a.sigma0 - b.sigma0).norm() == 0.0);

  // singular-value oracle for the condition number
  Eigen::JacobiSVD<OperatorMatrix> svd(a.omega0);
  const auto& s = svd.singularValues();
  CHECK(s(0) / s(s.size() - 1) <= 50.0);

  const DysonSeed c = build_dyson_seed(RandomSeed{50.0}, 8, 4);
  CHECK((a.omega0 - c.omega0).norm() > 0.0);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (double bound : {1.5, 10.0, 1e3}) {
      const DysonSeed d = build_dyson_seed(RandomSeed{bound}, seed, 6);
      CHECK(condition_number(d.omega0) <= bound);
    }
  }
}

TEST_CASE("random seed failure modes") {
  CHECK(kind_of([] { build_dyson_seed(RandomSeed{0.5}, 1, 3); }) == ErrorKind::CondBoundViolated);

  OperatorMatrix singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK(kind_of([&] { build_dyson_seed(ExplicitSeed{singular, {}, {}, 0.0}, 0, 2); }) ==
        ErrorKind::BadExplicitMatrix);
  CHECK(kind_of([&] { build_dyson_seed(ExplicitSeed{OperatorMatrix::Identity(3, 3), {}, {}, 0.0}, 0, 2); }) ==
        ErrorKind::BadExplicitMatrix);
}

TEST_CASE("explicit seed through the finite-difference route") {
  // Omega(t) = (I + t A) Omega0: forward difference is exact, so sigma(0) = i A.
  std::mt19937_64 rng(4);
  const OperatorMatrix a = dyson::testing::random_matrix(rng, 3, 0.2);
  const OperatorMatrix omega0 = OperatorMatrix::Identity(3, 3);
  const DysonSeed seed = build_dyson_seed(ExplicitSeed{omega0, {}, OperatorMatrix(omega0 + 1e-3 * a), 1e-3}, 0, 3);
  CHECK((seed.sigma0 - kI * a).norm() <= 1e-12);
}

TEST_CASE("parse_model_config: minimal constant document gets defaults") {
  const std::string doc = R"({
    "model": {"kind": "constant", "dim": 2, "matrix": [[[1,0],[0,0]],[[0,0],[1,0]]]}
  })";
  const ModelSpec spec = parse_model_config(doc);
  CHECK(spec.family.kind() == FamilyKind::Constant);
  CHECK(spec.family.dim() == 2);
  CHECK(spec.grid.dt == 1e-3);
  CHECK(spec.grid.t_final == 1.0);
  CHECK(spec.seed.index() == 0);
  CHECK(spec.name == "constant");
  CHECK(spec.output.format == "records");
}

TEST_CASE("parse_model_config: validation and parse errors") {
  const std::string bad_dt = R"({
    "model": {"kind": "constant", "dim": 1, "matrix": [[[1,0]]]},
    "grid": {"dt": -1}
  })";
  CHECK(kind_of([&] { parse_model_config(bad_dt); }) == ErrorKind::ValidationError);

  const std::string mismatch = R"({"model": {"kind": "constant", "dim": 3, "matrix": [[[1,0]]]}})";
  CHECK(kind_of([&] { parse_model_config(mismatch); }) == ErrorKind::ValidationError);

  const std::string unknown_kind = R"({"model": {"kind": "cubic", "dim": 1}})";
  CHECK(kind_of([&] { parse_model_config(unknown_kind); }) == ErrorKind::UnknownKind);

  const std::string broken = "{\n  \"model\": {\n    \"kind\": \"rabi\",,\n  }\n}";
  try {
    parse_model_config(broken);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  const std::string missing = R"({"model": {"kind": "rabi", "dim": 2, "params": {"epsilon": 1, "omega": 2}}})";
  try {
    parse_model_config(missing);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
    CHECK(std::string(e.what()).find("/model/params/coupling") != std::string::npos);
  }

  const ModelSpec bare = parse_model_config(R"({"model": {"kind": "rabi", "dim": 2}})");
  const auto& rabi = std::get<RabiFamily>(bare.family.variant());
  CHECK(rabi.epsilon == 1.0);
  CHECK(rabi.coupling == 0.5);
  CHECK(rabi.omega == 2.0);
}

TEST_CASE("parse_model_config: unknown keys are strict by default") {
  const std::string doc = R"({
    "model": {"kind": "rabi", "dim": 2, "params": {"epsilon": 1, "coupling": 0.5, "omega": 2}},
    "grid": {"dt": 0.01, "steps": 5}
  })";
  CHECK(kind_of([&] { parse_model_config(doc); }) == ErrorKind::ValidationError);
  const ModelSpec lenient = parse_model_config(doc, ParseOptions{true});
  REQUIRE(lenient.warnings.size() == 1);
  CHECK(lenient.warnings[0].find("/grid/steps") != std::string::npos);
}

TEST_CASE("parse -> serialize -> parse is the identity") {
  const std::string doc = R"({
    "name": "rabi-explicit",
    "model": {"kind": "rabi", "dim": 2, "params": {"epsilon": 1.0, "coupling": 0.5, "omega": 2.0}},
    "seed": {"recipe": "explicit",
             "omega0": [[[1.0, 0.1], [0.2, 0.0]], [[0.0, -0.3], [0.9, 0.0]]],
             "sigma0": [[[0.1, 0.2], [0.0, 0.0]], [[0.3, 0.0], [-0.2, 0.1]]],
             "rng_seed": 12},
    "grid": {"t_final": 2.0, "dt": 0.002},
    "output": {"format": "table", "tolerances": {"g_constancy": 1e-9},
               "initial_state": [[0.6, 0.0], [0.0, 0.8]], "scan_dts": [0.004, 0.002, 0.001]}
  })";
  const ModelSpec first = parse_model_config(doc);
  const std::string text = serialize_model_config(first);
  const ModelSpec second = parse_model_config(text);
  CHECK(first == second);
  CHECK(serialize_model_config(second) == text);

  // Every catalog shape survives the round trip as well.
  std::mt19937_64 rng(1);
  for (auto& family : sample_families()) {
    ModelSpec spec{.name = "sample", .family = family, .seed = RandomSeed{20.0}};
    spec.static_pair = StaticPair{OperatorMatrix::Identity(2, 2), OperatorMatrix::Identity(2, 2)};
    const ModelSpec back = parse_model_config(serialize_model_config(spec));
    CHECK(back == spec);
  }
}

TEST_CASE("validate enforces desk-scale limits") {
  CHECK_THROWS_AS(parse_model_config(R"({"model": {"kind": "rabi", "dim": 2, "params": {"epsilon": 500, "coupling": 0, "omega": 1}}})"),
                  Error);
  CHECK_THROWS_AS(parse_model_config(R"({"model": {"kind": "diagonal-poly", "dim": 1, "coefficients": [[0, 200]]}})"), Error);
  const ModelSpec big{.name = "big",
                      .family = HamiltonianFamily(ConstantFamily{OperatorMatrix::Zero(65, 65)}),
                      .seed = IdentitySeed{}};
  try {
    validate(big);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
    CHECK(std::string(e.what()).find("/model/dim") != std::string::npos);
  }
  const ModelSpec edge{.name = "edge",
                       .family = HamiltonianFamily(ConstantFamily{OperatorMatrix::Identity(64, 64)}),
                       .seed = IdentitySeed{}};
  CHECK_NOTHROW(validate(edge));
}
