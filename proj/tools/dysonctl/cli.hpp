#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace dyson::cli {

enum class Verb { Evolve, Check, Scan, Spectrum };

struct Command {
  Verb verb = Verb::Check;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;
  std::optional<double> dt;
  std::optional<double> t_final;
  /// identity | random[:COND_MAX] | scalar:RE,IM
  std::optional<std::string> seed_recipe;
  std::optional<std::uint64_t> rng_seed;
  std::map<std::string, double> tolerances;
  std::optional<std::string> format;
  bool lenient = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitNumerical = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "DYSON_OUT_DIR";

/// Executes one command. Diagnostics go to `err`, a one-line summary to `out`.
int run(const Command& command, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to run().
int main_entry(int argc, char** argv);

} // namespace dyson::cli
