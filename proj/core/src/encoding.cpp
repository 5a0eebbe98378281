#include "dyson/encoding.hpp"

namespace dyson::encoding {

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  fail(ErrorKind::ValidationError, where + ": " + what);
}

} // namespace

Json encode(Complex z) { return Json::array({z.real(), z.imag()}); }

Json encode(const OperatorMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(encode(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json encode(const StateVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode(v(i)));
  return out;
}

double decode_real(const Json& j, const std::string& where) {
  if (!j.is_number()) invalid(where, "expected a number");
  return j.get<double>();
}

Complex decode_complex(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) invalid(where, "expected a complex scalar [re, im]");
  return {decode_real(j[0], where + "/0"), decode_real(j[1], where + "/1")};
}

OperatorMatrix decode_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) invalid(where, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  OperatorMatrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    const std::string row_where = where + "/" + std::to_string(r);
    if (!row.is_array()) invalid(row_where, "expected an array of complex scalars");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      invalid(row_where, "ragged matrix row");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = decode_complex(row[static_cast<std::size_t>(c)], row_where + "/" + std::to_string(c));
    }
  }
  if (!m.allFinite()) invalid(where, "matrix entries must be finite");
  return m;
}

StateVector decode_state(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) invalid(where, "expected a non-empty array of complex scalars");
  StateVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = decode_complex(j[i], where + "/" + std::to_string(i));
  }
  if (!v.allFinite()) invalid(where, "state entries must be finite");
  return v;
}

} // namespace dyson::encoding
