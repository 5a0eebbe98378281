#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dyson/dyson.hpp"

namespace dyson::cli {

namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::ParseError:
  case ErrorKind::ValidationError:
  case ErrorKind::UnknownKind:
  case ErrorKind::BadExplicitMatrix:
  case ErrorKind::DimensionMismatch:
  case ErrorKind::InsufficientPoints:
    return kExitUsage;
  default:
    return kExitNumerical;
  }
}

std::string_view verb_name(Verb v) {
  switch (v) {
  case Verb::Evolve: return "evolve";
  case Verb::Check: return "check";
  case Verb::Scan: return "scan";
  case Verb::Spectrum: return "spectrum";
  }
  return "?";
}

SeedRecipe parse_recipe_override(const std::string& text, const SeedRecipe& current) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (name == "identity" && arg.empty()) return IdentitySeed{};
    if (name == "random") {
      double cond_max = 50.0;
      if (const auto* r = std::get_if<RandomSeed>(&current)) cond_max = r->cond_max;
      if (!arg.empty()) cond_max = std::stod(arg);
      return RandomSeed{cond_max};
    }
    if (name == "scalar") {
      const auto comma = arg.find(',');
      if (comma == std::string::npos) fail(ErrorKind::ValidationError, "--seed-recipe scalar:RE,IM");
      return ScalarSeed{Complex(std::stod(arg.substr(0, comma)), std::stod(arg.substr(comma + 1)))};
    }
  } catch (const std::logic_error&) {
    // std::stod failures
  }
  fail(ErrorKind::ValidationError, "unrecognized --seed-recipe '" + text + "'");
}

ModelSpec load_spec(const Command& cmd) {
  ModelSpec spec = parse_model_config(io::read_file(cmd.config), ParseOptions{cmd.lenient});
  if (cmd.dt) spec.grid.dt = *cmd.dt;
  if (cmd.t_final) spec.grid.t_final = *cmd.t_final;
  if (cmd.seed_recipe) spec.seed = parse_recipe_override(*cmd.seed_recipe, spec.seed);
  if (cmd.rng_seed) spec.rng_seed = *cmd.rng_seed;
  if (cmd.format) spec.output.format = *cmd.format;
  for (const auto& [name, tol] : cmd.tolerances) spec.output.tolerances[name] = tol;
  validate(spec);
  return spec;
}

fs::path output_dir(const Command& cmd, const ModelSpec& spec) {
  fs::path dir;
  if (cmd.out_dir) {
    dir = *cmd.out_dir;
  } else if (spec.output.directory) {
    dir = *spec.output.directory;
  } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
    dir = env;
  } else {
    dir = ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

Json config_echo(const ModelSpec& spec) { return Json::parse(serialize_model_config(spec)); }

void write_json(const fs::path& path, const Json& doc) { io::write_file_atomic(path, doc.dump(2) + "\n"); }

int run_evolve_or_check(const Command& cmd, const ModelSpec& spec, std::ostream& out, std::ostream& err) {
  const ExperimentRun result = run_experiment(spec);
  const fs::path dir = output_dir(cmd, spec);
  const io::TraceFormat format = io::parse_trace_format(spec.output.format);

  if (cmd.verb == Verb::Evolve) {
    const char* ext = format == io::TraceFormat::Records ? ".jsonl" : ".csv";
    io::emit_trace(result.flow, format, dir / (std::string("flow_trace") + ext));
    io::emit_trace(result.crypto, format, dir / (std::string("evolution_trace") + ext));
  }

  Json doc = to_json(result.report);
  doc["command"] = std::string(verb_name(cmd.verb));
  doc["config"] = config_echo(spec);
  write_json(dir / "report.json", doc);

  for (const auto& [name, ok] : result.report.status) {
    if (!ok) err << "check failed: " << name << " = " << result.report.residuals.at(name) << "\n";
  }
  for (const auto& [check, error] : result.report.failures) err << "check failed: " << check << " (" << error << ")\n";

  const bool passed = result.report.passed();
  out << fmt::format("{} {}: {}\n", verb_name(cmd.verb), spec.name, passed ? "pass" : "FAIL");
  return passed ? kExitOk : kExitCheckFailed;
}

int run_scan(const Command& cmd, const ModelSpec& spec, std::ostream& out, std::ostream& err) {
  const std::vector<double> dts =
      spec.output.scan_dts.empty() ? std::vector<double>{4e-3, 2e-3, 1e-3} : spec.output.scan_dts;
  const ScanResult scan = convergence_scan(spec, dts);
  const fs::path dir = output_dir(cmd, spec);
  io::write_file_atomic(dir / "scan.csv", io::scan_table(scan));

  bool passed = true;
  Json orders = Json::object();
  for (const auto& [name, fit] : scan.orders) {
    const bool ok = fit.saturated || (fit.order >= 3.5 && fit.order <= 4.5);
    passed = passed && ok;
    orders[name] = {{"order", fit.saturated ? Json(nullptr) : Json(fit.order)},
                    {"saturated", fit.saturated},
                    {"points", fit.points},
                    {"pass", ok}};
    if (!ok) err << fmt::format("order check failed: {} = {:.3f} outside [3.5, 4.5]\n", name, fit.order);
  }
  Json rows = Json::array();
  for (const auto& r : scan.rows) {
    rows.push_back({{"dt", r.dt}, {"g_constancy", r.g_constancy}, {"cross_backend", r.cross_backend}});
  }
  write_json(dir / "report.json",
             {{"command", "scan"}, {"model", spec.name}, {"rows", rows}, {"orders", orders}, {"passed", passed},
              {"config", config_echo(spec)}});
  out << fmt::format("scan {}: {}\n", spec.name, passed ? "pass" : "FAIL");
  return passed ? kExitOk : kExitCheckFailed;
}

Json spectrum_json(const Spectrum& s) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < s.size(); ++i) out.push_back(encoding::encode(s.eigenvalues(i)));
  return out;
}

int run_spectrum(const Command& cmd, const ModelSpec& spec, std::ostream& out, std::ostream& err) {
  const DysonSeed seed = build_dyson_seed(spec.seed, spec.rng_seed, spec.family.dim(), spec.cond_bound);
  const OperatorMatrix h0 = eval_h(spec.family, 0.0);
  const OperatorMatrix omega_inv = inverse(seed.omega0);
  const OperatorMatrix big_h0 = omega_inv * h0 * seed.omega0;
  const OperatorMatrix g = generator_g0(h0, seed);

  const Spectrum sh = spectrum(h0);
  const Spectrum sH = spectrum(big_h0);
  const Spectrum sG = spectrum(g);
  const Spectrum sK = spectrum(h0 - seed.sigma0);
  const double cond = condition_number(seed.omega0);
  const double tol = 1e-8 * cond;
  const double delta_h = spectrum_distance(sH, sh);
  const double delta_g = spectrum_distance(sG, sK);
  const bool passed = delta_h <= tol && delta_g <= tol;

  const fs::path dir = output_dir(cmd, spec);
  write_json(dir / "spectrum.json", {{"command", "spectrum"},
                                     {"model", spec.name},
                                     {"h0", spectrum_json(sh)},
                                     {"H0", spectrum_json(sH)},
                                     {"G", spectrum_json(sG)},
                                     {"h0_minus_sigma0", spectrum_json(sK)},
                                     {"cond_omega0", cond},
                                     {"delta_H0_vs_h0", delta_h},
                                     {"delta_G_vs_h0_minus_sigma0", delta_g},
                                     {"tolerance", tol},
                                     {"passed", passed}});
  if (!passed) err << fmt::format("isospectrality failed: deltas {:.3e}, {:.3e} > {:.3e}\n", delta_h, delta_g, tol);
  out << fmt::format("spectrum {}: {}\n", spec.name, passed ? "pass" : "FAIL");
  return passed ? kExitOk : kExitCheckFailed;
}

} // namespace

int run(const Command& command, std::ostream& out, std::ostream& err) {
  try {
    const ModelSpec spec = load_spec(command);
    for (const auto& w : spec.warnings) err << "warning: " << w << "\n";
    switch (command.verb) {
    case Verb::Evolve:
    case Verb::Check: return run_evolve_or_check(command, spec, out, err);
    case Verb::Scan: return run_scan(command, spec, out, err);
    case Verb::Spectrum: return run_spectrum(command, spec, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Crypto-unitary evolution engine: Dyson flows, constant generators and their verification"};
  app.require_subcommand(1);

  Command cmd;
  std::string out_dir;
  std::vector<std::string> tols;
  std::string recipe;
  std::uint64_t rng_seed = 0;
  double dt = 0.0;
  double t_final = 0.0;
  std::string format;

  const std::vector<std::pair<Verb, const char*>> verbs = {
      {Verb::Evolve, "Integrate the flow, propagate, verify; write traces and report"},
      {Verb::Check, "Run every verification check; write the report only"},
      {Verb::Scan, "Fit convergence orders over a ladder of step sizes"},
      {Verb::Spectrum, "Spectra of h(0), H(0) and G with isospectrality deltas"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [verb, help] : verbs) {
    CLI::App* sub = app.add_subcommand(std::string(verb_name(verb)), help);
    sub->add_option("--config", cmd.config, "Configuration file (JSON)")->required();
    sub->add_option("--out", out_dir, std::string("Output directory (default: config, then $") + kOutDirEnv + ", then .)");
    sub->add_option("--dt", dt, "Override grid step");
    sub->add_option("--t-final", t_final, "Override final time");
    sub->add_option("--seed-recipe", recipe, "identity | random[:COND] | scalar:RE,IM");
    sub->add_option("--rng-seed", rng_seed, "Override RNG seed for random recipes");
    sub->add_option("--tol", tols, "Tolerance override NAME=X (repeatable)");
    sub->add_option("--format", format, "Trace format")->check(CLI::IsMember({"records", "table"}));
    sub->add_flag("--lenient", cmd.lenient, "Downgrade unknown config keys to warnings");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* sub = subs[i];
    if (!sub->parsed()) continue;
    cmd.verb = verbs[i].first;
    if (sub->count("--out")) cmd.out_dir = out_dir;
    if (sub->count("--dt")) cmd.dt = dt;
    if (sub->count("--t-final")) cmd.t_final = t_final;
    if (sub->count("--seed-recipe")) cmd.seed_recipe = recipe;
    if (sub->count("--rng-seed")) cmd.rng_seed = rng_seed;
    if (sub->count("--format")) cmd.format = format;
  }
  for (const auto& t : tols) {
    const auto eq = t.find('=');
    try {
      if (eq == std::string::npos) throw std::invalid_argument(t);
      cmd.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    } catch (const std::logic_error&) {
      std::cerr << "error: --tol expects NAME=X, got '" << t << "'\n";
      return kExitUsage;
    }
  }
  return run(cmd, std::cout, std::cerr);
}

} // namespace dyson::cli
