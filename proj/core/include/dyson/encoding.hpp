#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "dyson/operator_core.hpp"

// Text encoding shared by configs and traces: a complex scalar is a
// two-element array [re, im], a matrix is a row-major array of rows and a
// state is a flat array of scalars.

namespace dyson::encoding {

using Json = nlohmann::json;

Json encode(Complex z);
Json encode(const OperatorMatrix& m);
Json encode(const StateVector& v);

// `where` is a JSON-pointer style path used in ValidationError messages.
Complex decode_complex(const Json& j, const std::string& where);
OperatorMatrix decode_matrix(const Json& j, const std::string& where);
StateVector decode_state(const Json& j, const std::string& where);
double decode_real(const Json& j, const std::string& where);

} // namespace dyson::encoding
