#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dyson/dyson_flow.hpp"
#include "dyson/propagators.hpp"
#include "dyson/verify.hpp"

namespace dyson::io {

enum class TraceFormat {
  /// Line-delimited JSON, one header line then one record per node.
  /// Doubles use the shortest round-trip rendering, so re-parsing is exact.
  Records,
  /// CSV, one column per real/imaginary component, 17 significant digits.
  Table,
};

TraceFormat parse_trace_format(std::string_view name);

std::string flow_records(const FlowTrace& flow);
std::string flow_table(const FlowTrace& flow);
FlowTrace parse_flow_records(std::string_view text);

std::string evolution_records(const EvolutionTrace& trace);
std::string evolution_table(const EvolutionTrace& trace);
EvolutionTrace parse_evolution_records(std::string_view text);

std::string scan_table(const ScanResult& scan);

/// Writes `content` to a sibling temporary file and renames it over `path`.
/// Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

void emit_trace(const FlowTrace& flow, TraceFormat format, const std::filesystem::path& destination);
void emit_trace(const EvolutionTrace& trace, TraceFormat format, const std::filesystem::path& destination);

} // namespace dyson::io
