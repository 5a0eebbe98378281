#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyson/verify.hpp"
#include "test_support.hpp"

using namespace dyson;

namespace {

ModelSpec rabi_spec(double dt = 1e-3) {
  return ModelSpec{.name = "rabi",
                   .family = HamiltonianFamily(RabiFamily{2.0, 1.5, 5.0}),
                   .seed = RandomSeed{50.0},
                   .rng_seed = 7,
                   .grid = Grid{1.0, dt}};
}

FlowTrace rabi_flow(DysonSeed* seed_out = nullptr) {
  const ModelSpec spec = rabi_spec();
  const DysonSeed seed = build_dyson_seed(spec.seed, spec.rng_seed, 2);
  if (seed_out) *seed_out = seed;
  return integrate_flow(spec.family, seed, spec.grid);
}

} // namespace

TEST_CASE("check_g_constancy") {
  const HamiltonianFamily still(ConstantFamily{OperatorMatrix::Identity(2, 2)});
  const FlowTrace trivial =
      integrate_flow(still, DysonSeed{OperatorMatrix::Identity(2, 2), OperatorMatrix::Zero(2, 2)}, Grid{1.0, 1e-2});
  CHECK(check_g_constancy(still, trivial) == 0.0);

  const HamiltonianFamily rabi(RabiFamily{2.0, 1.5, 5.0});
  FlowTrace flow = rabi_flow();
  CHECK(check_g_constancy(rabi, flow) <= 1e-8);

  std::mt19937_64 rng(1);
  OperatorMatrix direction = dyson::testing::random_matrix(rng, 2);
  direction /= direction.norm();
  flow.omega[500] += 1e-3 * direction;
  CHECK(check_g_constancy(rabi, flow) >= 1e-4);
}

TEST_CASE("check_theta_evolution") {
  DysonSeed seed;
  const FlowTrace flow = rabi_flow(&seed);
  const OperatorMatrix g = generator_g0(eval_h(HamiltonianFamily(RabiFamily{2.0, 1.5, 5.0}), 0.0), seed);
  CHECK(check_theta_evolution(flow, g) <= 1e-8);

  std::mt19937_64 rng(2);
  OperatorMatrix corruption = dyson::testing::random_matrix(rng, 2);
  corruption /= corruption.norm();
  CHECK(check_theta_evolution(flow, g + 1e-3 * corruption) >= 1e-5);

  const auto thetas = metric_trace(flow);
  for (std::size_t k = 0; k < thetas.size(); k += 100) CHECK(is_positive_definite(thetas[k]));
}

TEST_CASE("check_dieudonne") {
  OperatorMatrix nil = OperatorMatrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  CHECK(check_dieudonne(nil, OperatorMatrix::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    const OperatorMatrix omega = dyson::testing::random_invertible(rng, n);
    const OperatorMatrix h = dyson::testing::random_hermitian(rng, n);
    const OperatorMatrix big_h = omega.inverse() * h * omega;
    const OperatorMatrix theta = omega.adjoint() * omega;
    CHECK(check_dieudonne(big_h, theta) <= 1e-12);

    // Unitary covariance: (U^dagger H U, U^dagger Theta U) has the same residual.
    const OperatorMatrix u = dyson::testing::random_unitary(rng, n);
    const OperatorMatrix a = dyson::testing::random_matrix(rng, n);
    const OperatorMatrix th = dyson::testing::random_hermitian(rng, n);
    const double before = check_dieudonne(a, th);
    const double after = check_dieudonne(u.adjoint() * a * u, u.adjoint() * th * u);
    CHECK(std::abs(before - after) <= 1e-12 * std::max(1.0, before));
  }

  CHECK_THROWS_AS(check_dieudonne(OperatorMatrix::Identity(2, 2), OperatorMatrix::Identity(3, 3)), Error);
}

TEST_CASE("check_unitarity") {
  EvolutionTrace single;
  single.times = {0.0};
  single.states = {map_states(StateVector::Unit(2, 0), OperatorMatrix::Identity(2, 2))};
  const UnitarityDrifts zero = check_unitarity(single, {OperatorMatrix::Identity(2, 2)});
  CHECK(zero.physical_norm_drift == 0.0);
  CHECK(zero.ketket_overlap_drift == 0.0);
  CHECK(zero.dirac_norm_drift == 0.0);

  DysonSeed seed;
  const FlowTrace flow = rabi_flow(&seed);
  const HamiltonianFamily rabi(RabiFamily{2.0, 1.5, 5.0});
  const OperatorMatrix g = generator_g0(eval_h(rabi, 0.0), seed);
  const auto thetas = metric_trace(flow);
  const StateVector phi0 = StateVector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0));
  const EvolutionTrace crypto = evolve_cryptounitary(g, flow, phi0);
  const UnitarityDrifts d = check_unitarity(crypto, thetas);
  CHECK(d.physical_norm_drift <= 1e-8);
  CHECK(d.ketket_overlap_drift <= 1e-8);
  CHECK(d.dirac_norm_drift > 1e-3);

  const EvolutionTrace e1 = evolve_cryptounitary(g, flow, StateVector::Unit(2, 0));
  const EvolutionTrace e2 = evolve_cryptounitary(g, flow, StateVector::Unit(2, 1));
  CHECK(ketket_pair_drift(e1, e2, thetas) <= 1e-8);
  CHECK(ketket_pair_drift(e1, e1, thetas) <= 1e-8);

  CHECK_THROWS_AS(check_unitarity(crypto, {thetas.front()}), Error);
}

TEST_CASE("global phase of the Dyson map leaves every residual unchanged") {
  const HamiltonianFamily rabi(RabiFamily{2.0, 1.5, 5.0});
  DysonSeed seed;
  const FlowTrace flow = rabi_flow(&seed);
  const Complex phase = std::exp(kI * 0.7);
  const DysonSeed rotated{phase * seed.omega0, seed.sigma0};
  const FlowTrace flow2 = integrate_flow(rabi, rotated, Grid{1.0, 1e-3});
  const OperatorMatrix g = generator_g0(eval_h(rabi, 0.0), seed);
  const OperatorMatrix g2 = generator_g0(eval_h(rabi, 0.0), rotated);
  CHECK((g - g2).norm() <= 1e-13);
  CHECK(std::abs(check_g_constancy(rabi, flow) - check_g_constancy(rabi, flow2)) <= 1e-13);
  CHECK(std::abs(check_theta_evolution(flow, g) - check_theta_evolution(flow2, g2)) <= 1e-13);
  const auto t1 = metric_trace(flow);
  const auto t2 = metric_trace(flow2);
  for (std::size_t k = 0; k < t1.size(); k += 250) CHECK((t1[k] - t2[k]).norm() <= 1e-12);
}

TEST_CASE("fit_order") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coeff(0.1, 10.0), power(1.0, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double c = coeff(rng), p = power(rng);
    std::vector<double> dts = {4e-2, 2e-2, 1e-2, 5e-3};
    std::vector<double> res;
    for (double dt : dts) res.push_back(c * std::pow(dt, p));
    const OrderFit fit = fit_order(dts, res);
    CHECK_FALSE(fit.saturated);
    CHECK(fit.points == 4);
    CHECK(fit.order == doctest::Approx(p).epsilon(1e-10));
  }

  const OrderFit flat = fit_order({1e-2, 5e-3, 2.5e-3}, {1e-16, 0.0, 3e-17});
  CHECK(flat.saturated);
  CHECK(std::isnan(flat.order));

  const OrderFit partial = fit_order({1e-2, 5e-3, 2.5e-3}, {1e-6, 1e-16, 0.0});
  CHECK(partial.saturated);
  CHECK(partial.points == 1);
}

TEST_CASE("convergence_scan") {
  const ScanResult scan = convergence_scan(rabi_spec(), {4e-3, 2e-3, 1e-3});
  REQUIRE(scan.rows.size() == 3);
  const OrderFit& g = scan.orders.at(kGConstancy);
  const OrderFit& x = scan.orders.at(kCrossBackend);
  CHECK_FALSE(g.saturated);
  CHECK(g.order == doctest::Approx(4.0).epsilon(0.125));
  CHECK_FALSE(x.saturated);
  CHECK(x.order == doctest::Approx(4.0).epsilon(0.125));

  const ModelSpec still{.name = "still",
                        .family = HamiltonianFamily(ConstantFamily{OperatorMatrix::Identity(2, 2)}),
                        .seed = IdentitySeed{}};
  const ScanResult flat = convergence_scan(still, {4e-3, 2e-3, 1e-3});
  CHECK(flat.orders.at(kGConstancy).saturated);

  try {
    convergence_scan(rabi_spec(), {2e-3, 1e-3});
    FAIL("expected InsufficientPoints");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientPoints);
  }
  CHECK_THROWS_AS(convergence_scan(rabi_spec(), {1e-3, 2e-3, 4e-3}), Error);
}

TEST_CASE("run_experiment") {
  const ExperimentRun run = run_experiment(rabi_spec());
  CHECK(run.report.passed());
  for (const char* name : {kGConstancy, kThetaIntertwine, kDieudonne, kCrossBackend, kPhysicalNormDrift,
                           kKetketOverlapDrift}) {
    REQUIRE(run.report.residuals.count(name) == 1);
    CHECK(run.report.status.at(name));
  }
  CHECK(run.report.diagnostics.at("dirac_norm_drift") > 1e-3);
  CHECK(run.report.diagnostics.at("max_omega_condition") <= 1e12);

  const nlohmann::json j = to_json(run.report);
  CHECK(j.at("passed").get<bool>());
  CHECK(j.at("model") == "rabi");

  ModelSpec bad_tol = rabi_spec();
  bad_tol.output.tolerances["no_such_check"] = 1.0;
  CHECK_THROWS_AS(run_experiment(bad_tol), Error);

  // A tolerance below the attained residual flips the status.
  ModelSpec strict = rabi_spec(4e-3);
  strict.output.tolerances[kGConstancy] = 1e-20;
  const ExperimentRun failing = run_experiment(strict);
  CHECK_FALSE(failing.report.status.at(kGConstancy));
  CHECK_FALSE(failing.report.passed());

  ModelSpec with_static = rabi_spec();
  OperatorMatrix h(2, 2);
  h << 1.0, 1.0, 0.0, -1.0;
  with_static.static_pair = StaticPair{h, OperatorMatrix::Identity(2, 2)};
  const ExperimentRun broken = run_experiment(with_static);
  CHECK_FALSE(broken.report.passed());
  REQUIRE(broken.report.failures.size() == 1);
  CHECK(broken.report.failures[0].second == "NotQuasiHermitian");
}

TEST_CASE("fault injection is detected") {
  // Corrupting sigma at one node breaks the flow consistency that every
  // downstream identity relies on.
  const HamiltonianFamily rabi(RabiFamily{2.0, 1.5, 5.0});
  DysonSeed seed;
  FlowTrace flow = rabi_flow(&seed);
  const OperatorMatrix g = generator_g0(eval_h(rabi, 0.0), seed);
  const double eps = 1e-6;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    FlowTrace corrupted = flow;
    const std::size_t node = 100 + 150 * static_cast<std::size_t>(trial);
    OperatorMatrix d = dyson::testing::random_matrix(rng, 2);
    corrupted.omega[node] += 1e-4 * d / d.norm();
    const double worst = std::max(check_g_constancy(rabi, corrupted), check_theta_evolution(corrupted, g));
    CHECK(worst > eps / 10.0);
  }
}
