#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dyson/io.hpp"
#include "dysonctl/cli.hpp"

using namespace dyson;
using dyson::cli::Command;
using dyson::cli::Verb;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = DYSON_CONFIG_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dyson_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(Command cmd) {
  std::ostringstream out, err;
  const int code = cli::run(cmd, out, err);
  return {code, out.str(), err.str()};
}

Command command(Verb verb, const std::string& config, const fs::path& out_dir) {
  Command cmd;
  cmd.verb = verb;
  cmd.config = kConfigs / config;
  cmd.out_dir = out_dir;
  return cmd;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(io::read_file(p)); }

} // namespace

TEST_CASE("evolve writes traces and a passing report") {
  TempDir dir;
  const Outcome r = run(command(Verb::Evolve, "constant.json", dir.path));
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "evolve constant-3: pass\n");
  CHECK(fs::exists(dir.path / "flow_trace.jsonl"));
  CHECK(fs::exists(dir.path / "evolution_trace.jsonl"));
  const auto report = read_json(dir.path / "report.json");
  CHECK(report.at("passed").get<bool>());
  CHECK(report.at("command") == "evolve");
  CHECK(report.at("residuals").at("g_constancy").get<double>() <= 1e-12);
  CHECK(report.at("config").at("name") == "constant-3");

  const FlowTrace flow = io::parse_flow_records(io::read_file(dir.path / "flow_trace.jsonl"));
  CHECK(flow.size() == 1001);
}

TEST_CASE("table format through the override") {
  TempDir dir;
  Command cmd = command(Verb::Evolve, "diagonal_poly.json", dir.path);
  cmd.format = "table";
  CHECK(run(cmd).code == cli::kExitOk);
  CHECK(fs::exists(dir.path / "flow_trace.csv"));
  CHECK(fs::exists(dir.path / "evolution_trace.csv"));
}

TEST_CASE("check passes on every shipped dynamic model") {
  for (const char* config : {"constant.json", "diagonal_poly.json", "rabi.json", "poly_matrix.json", "rabi_scan.json"}) {
    TempDir dir;
    const Outcome r = run(command(Verb::Check, config, dir.path));
    INFO(config << ": " << r.err);
    CHECK(r.code == cli::kExitOk);
    CHECK_FALSE(fs::exists(dir.path / "flow_trace.jsonl"));
  }
}

TEST_CASE("check reports a failed static precondition with exit 2") {
  TempDir dir;
  const Outcome r = run(command(Verb::Check, "static_not_quasi_hermitian.json", dir.path));
  CHECK(r.code == cli::kExitCheckFailed);
  CHECK(r.err.find("NotQuasiHermitian") != std::string::npos);
  const auto report = read_json(dir.path / "report.json");
  CHECK_FALSE(report.at("passed").get<bool>());
  CHECK(report.at("failures").at(0).at("error") == "NotQuasiHermitian");
}

TEST_CASE("tolerance overrides") {
  TempDir dir;
  Command cmd = command(Verb::Check, "rabi.json", dir.path);
  cmd.tolerances["g_constancy"] = 1e-30;
  const Outcome tight = run(cmd);
  CHECK(tight.code == cli::kExitCheckFailed);
  CHECK(tight.err.find("g_constancy") != std::string::npos);

  cmd.tolerances = {{"bogus", 1.0}};
  CHECK(run(cmd).code == cli::kExitUsage);
}

TEST_CASE("scan fits fourth order") {
  TempDir dir;
  const Outcome r = run(command(Verb::Scan, "rabi_scan.json", dir.path));
  CHECK(r.code == cli::kExitOk);
  const auto report = read_json(dir.path / "report.json");
  for (const char* name : {"g_constancy", "cross_backend"}) {
    const auto& fit = report.at("orders").at(name);
    CHECK_FALSE(fit.at("saturated").get<bool>());
    CHECK(fit.at("order").get<double>() >= 3.5);
    CHECK(fit.at("order").get<double>() <= 4.5);
  }
  const std::string csv = io::read_file(dir.path / "scan.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("spectrum") {
  TempDir dir;
  CHECK(run(command(Verb::Spectrum, "poly_matrix.json", dir.path)).code == cli::kExitOk);
  const auto doc = read_json(dir.path / "spectrum.json");
  CHECK(doc.at("passed").get<bool>());
  CHECK(doc.at("h0").size() == 4);
  CHECK(doc.at("delta_H0_vs_h0").get<double>() <= doc.at("tolerance").get<double>());
}

TEST_CASE("seed overrides") {
  TempDir dir;
  Command cmd = command(Verb::Check, "constant.json", dir.path);
  cmd.seed_recipe = "scalar:0,0.3";
  CHECK(run(cmd).code == cli::kExitOk);
  CHECK(read_json(dir.path / "report.json").at("config").at("seed").at("recipe") == "scalar");
  cmd.seed_recipe = "random:20";
  cmd.rng_seed = 99;
  CHECK(run(cmd).code == cli::kExitOk);
  cmd.seed_recipe = "mystery";
  CHECK(run(cmd).code == cli::kExitUsage);
}

TEST_CASE("usage errors exit 1") {
  TempDir dir;
  CHECK(run(command(Verb::Check, "does_not_exist.json", dir.path)).code == cli::kExitNumerical);

  const fs::path broken = dir.path / "broken.json";
  io::write_file_atomic(broken, "{\n  \"name\": \"x\",\n  \"model\": {\"kind\": \"rabi\", \"dim\": 2,}\n}\n");
  Command cmd = command(Verb::Check, "", dir.path);
  cmd.config = broken;
  Outcome r = run(cmd);
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("line 3") != std::string::npos);

  io::write_file_atomic(broken, R"({"model": {"kind": "warp", "dim": 2}})");
  CHECK(run(cmd).code == cli::kExitUsage);

  io::write_file_atomic(broken, R"({"model": {"kind": "rabi", "dim": 2}, "extra": 1})");
  CHECK(run(cmd).code == cli::kExitUsage);
  cmd.lenient = true;
  r = run(cmd);
  CHECK(r.code == cli::kExitOk);
  CHECK(r.err.find("warning") != std::string::npos);

  cmd = command(Verb::Check, "rabi.json", dir.path);
  cmd.dt = 2.0;
  CHECK(run(cmd).code == cli::kExitUsage);
}

TEST_CASE("numerical failures exit 3") {
  TempDir dir;
  // sigma(0) = diag(20i, -20i) drives cond(Omega) past 1e12 before t = 1.
  const fs::path config = dir.path / "runaway.json";
  io::write_file_atomic(config, R"({
    "name": "runaway",
    "model": {"kind": "constant", "dim": 2, "matrix": [[0, 0], [0, 0]]},
    "seed": {"recipe": "explicit", "omega0": [[1, 0], [0, 1]], "sigma0": [[[0, 20], 0], [0, [0, -20]]]}
  })");
  Command cmd = command(Verb::Check, "", dir.path / "out");
  cmd.config = config;
  const Outcome r = run(cmd);
  CHECK(r.code == cli::kExitNumerical);
  CHECK(r.err.find("exceeds 1e12") != std::string::npos);

  // Output directory below a regular file.
  const fs::path blocked = dir.path / "file";
  io::write_file_atomic(blocked, "x");
  CHECK(run(command(Verb::Check, "constant.json", blocked / "sub")).code == cli::kExitNumerical);
}

TEST_CASE("output directory falls back to the environment") {
  TempDir dir;
  ::setenv(cli::kOutDirEnv, dir.path.c_str(), 1);
  Command cmd;
  cmd.verb = Verb::Check;
  cmd.config = kConfigs / "constant.json";
  CHECK(run(cmd).code == cli::kExitOk);
  ::unsetenv(cli::kOutDirEnv);
  CHECK(fs::exists(dir.path / "report.json"));
}

TEST_CASE("runs are deterministic") {
  TempDir a, b;
  CHECK(run(command(Verb::Evolve, "poly_matrix.json", a.path)).code == cli::kExitOk);
  CHECK(run(command(Verb::Evolve, "poly_matrix.json", b.path)).code == cli::kExitOk);
  for (const char* file : {"flow_trace.jsonl", "evolution_trace.jsonl"}) {
    CHECK(io::read_file(a.path / file) == io::read_file(b.path / file));
  }
  auto ra = read_json(a.path / "report.json");
  auto rb = read_json(b.path / "report.json");
  ra.erase("wall_time_s");
  rb.erase("wall_time_s");
  CHECK(ra.dump() == rb.dump());
}

TEST_CASE("argv front end") {
  TempDir dir;
  const std::string config = (kConfigs / "constant.json").string();
  const std::string out = dir.path.string();
  std::vector<std::string> args = {"dysonctl", "check", "--config", config, "--out", out, "--tol", "g_constancy=1e-6"};
  std::vector<char*> argv;
  for (auto& s : args) argv.push_back(s.data());
  CHECK(cli::main_entry(static_cast<int>(argv.size()), argv.data()) == cli::kExitOk);

  std::vector<std::string> bad = {"dysonctl", "check", "--config", config, "--tol", "oops"};
  argv.clear();
  for (auto& s : bad) argv.push_back(s.data());
  CHECK(cli::main_entry(static_cast<int>(argv.size()), argv.data()) == cli::kExitUsage);

  std::vector<std::string> none = {"dysonctl"};
  argv.clear();
  for (auto& s : none) argv.push_back(s.data());
  CHECK(cli::main_entry(static_cast<int>(argv.size()), argv.data()) == cli::kExitUsage);
}
