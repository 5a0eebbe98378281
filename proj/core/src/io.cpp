#include "dyson/io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>
#include <unistd.h>

#include "dyson/encoding.hpp"

namespace dyson::io {

namespace {

using encoding::Json;

constexpr int kFormatVersion = 1;

std::string num(double x) { return fmt::format("{:.17g}", x); }

void append_matrix_header(std::string& out, const std::string& name, Eigen::Index n) {
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out += fmt::format(",{0}_{1}_{2}_re,{0}_{1}_{2}_im", name, r, c);
    }
  }
}

void append_vector_header(std::string& out, const std::string& name, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) out += fmt::format(",{0}_{1}_re,{0}_{1}_im", name, i);
}

void append_values(std::string& out, const OperatorMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out += ',';
      out += num(m(r, c).real());
      out += ',';
      out += num(m(r, c).imag());
    }
  }
}

void append_values(std::string& out, const StateVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += ',';
    out += num(v(i).real());
    out += ',';
    out += num(v(i).imag());
  }
}

std::vector<Json> parse_lines(std::string_view text, const char* expected_kind) {
  std::vector<Json> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(Json::parse(line.begin(), line.end()));
    } catch (const Json::parse_error& e) {
      fail(ErrorKind::ParseError, fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  if (records.empty()) fail(ErrorKind::ParseError, "missing header record");
  const Json& header = records.front();
  if (!header.is_object() || header.value("record", "") != "header" || header.value("kind", "") != expected_kind) {
    fail(ErrorKind::ParseError, fmt::format("line 1: expected a '{}' header record", expected_kind));
  }
  if (header.value("version", 0) != kFormatVersion) fail(ErrorKind::ParseError, "unsupported format version");
  return records;
}

double record_real(const Json& rec, const char* key, std::size_t line) {
  if (!rec.contains(key)) fail(ErrorKind::ParseError, fmt::format("line {}: missing field '{}'", line, key));
  return encoding::decode_real(rec.at(key), fmt::format("line {}/{}", line, key));
}

} // namespace

TraceFormat parse_trace_format(std::string_view name) {
  if (name == "records") return TraceFormat::Records;
  if (name == "table") return TraceFormat::Table;
  fail(ErrorKind::ValidationError, "unknown trace format '" + std::string(name) + "'");
}

std::string flow_records(const FlowTrace& flow) {
  const Eigen::Index n = flow.omega.empty() ? 0 : flow.omega.front().rows();
  std::string out = Json{{"record", "header"}, {"kind", "flow_trace"}, {"version", kFormatVersion}, {"dim", n},
                         {"dt", flow.dt}}
                        .dump();
  out += '\n';
  for (std::size_t k = 0; k < flow.size(); ++k) {
    out += Json{{"t", flow.times[k]}, {"sigma", encoding::encode(flow.sigma[k])},
                {"omega", encoding::encode(flow.omega[k])}}
               .dump();
    out += '\n';
  }
  return out;
}

FlowTrace parse_flow_records(std::string_view text) {
  const std::vector<Json> records = parse_lines(text, "flow_trace");
  FlowTrace flow;
  flow.dt = record_real(records.front(), "dt", 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const Json& rec = records[i];
    const std::size_t line = i + 1;
    if (!rec.is_object() || !rec.contains("sigma") || !rec.contains("omega")) {
      fail(ErrorKind::ParseError, fmt::format("line {}: expected fields t, sigma, omega", line));
    }
    flow.times.push_back(record_real(rec, "t", line));
    flow.sigma.push_back(encoding::decode_matrix(rec.at("sigma"), fmt::format("line {}/sigma", line)));
    flow.omega.push_back(encoding::decode_matrix(rec.at("omega"), fmt::format("line {}/omega", line)));
  }
  return flow;
}

std::string flow_table(const FlowTrace& flow) {
  const Eigen::Index n = flow.omega.empty() ? 0 : flow.omega.front().rows();
  std::string out = "t";
  append_matrix_header(out, "sigma", n);
  append_matrix_header(out, "omega", n);
  out += '\n';
  for (std::size_t k = 0; k < flow.size(); ++k) {
    out += num(flow.times[k]);
    append_values(out, flow.sigma[k]);
    append_values(out, flow.omega[k]);
    out += '\n';
  }
  return out;
}

std::string evolution_records(const EvolutionTrace& trace) {
  const Eigen::Index n = trace.states.empty() ? 0 : trace.states.front().phi.size();
  std::string out =
      Json{{"record", "header"}, {"kind", "evolution_trace"}, {"version", kFormatVersion}, {"dim", n}}.dump();
  out += '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const StateTriple& s = trace.states[k];
    out += Json{{"t", trace.times[k]},
                {"phi", encoding::encode(s.phi)},
                {"phi_friendly", encoding::encode(s.phi_friendly)},
                {"phi_ketket", encoding::encode(s.phi_ketket)},
                {"dirac_norm", trace.dirac_norm[k]},
                {"physical_norm", trace.physical_norm[k]}}
               .dump();
    out += '\n';
  }
  return out;
}

EvolutionTrace parse_evolution_records(std::string_view text) {
  const std::vector<Json> records = parse_lines(text, "evolution_trace");
  EvolutionTrace trace;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const Json& rec = records[i];
    const std::size_t line = i + 1;
    for (const char* key : {"phi", "phi_friendly", "phi_ketket"}) {
      if (!rec.is_object() || !rec.contains(key)) {
        fail(ErrorKind::ParseError, fmt::format("line {}: missing field '{}'", line, key));
      }
    }
    trace.times.push_back(record_real(rec, "t", line));
    trace.states.push_back({encoding::decode_state(rec.at("phi"), fmt::format("line {}/phi", line)),
                            encoding::decode_state(rec.at("phi_friendly"), fmt::format("line {}/phi_friendly", line)),
                            encoding::decode_state(rec.at("phi_ketket"), fmt::format("line {}/phi_ketket", line))});
    trace.dirac_norm.push_back(record_real(rec, "dirac_norm", line));
    trace.physical_norm.push_back(record_real(rec, "physical_norm", line));
  }
  return trace;
}

std::string evolution_table(const EvolutionTrace& trace) {
  const Eigen::Index n = trace.states.empty() ? 0 : trace.states.front().phi.size();
  std::string out = "t";
  append_vector_header(out, "phi", n);
  append_vector_header(out, "phi_friendly", n);
  append_vector_header(out, "phi_ketket", n);
  out += ",dirac_norm,physical_norm\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out += num(trace.times[k]);
    append_values(out, trace.states[k].phi);
    append_values(out, trace.states[k].phi_friendly);
    append_values(out, trace.states[k].phi_ketket);
    out += ',' + num(trace.dirac_norm[k]) + ',' + num(trace.physical_norm[k]) + '\n';
  }
  return out;
}

std::string scan_table(const ScanResult& scan) {
  std::string out = "dt,g_constancy,cross_backend\n";
  for (const auto& row : scan.rows) {
    out += num(row.dt) + ',' + num(row.g_constancy) + ',' + num(row.cross_backend) + '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + fmt::format(".tmp.{}", static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      fail(ErrorKind::IoError, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    fail(ErrorKind::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit_trace(const FlowTrace& flow, TraceFormat format, const std::filesystem::path& destination) {
  write_file_atomic(destination, format == TraceFormat::Records ? flow_records(flow) : flow_table(flow));
}

void emit_trace(const EvolutionTrace& trace, TraceFormat format, const std::filesystem::path& destination) {
  write_file_atomic(destination, format == TraceFormat::Records ? evolution_records(trace) : evolution_table(trace));
}

} // namespace dyson::io
