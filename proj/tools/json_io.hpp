#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qleb/matcore.hpp"

// JSON encoding shared by the command-line tool and its tests. Complex
// numbers are [re, im] pairs; square matrices are {"dim", "entries"[, "label"]}.
namespace qleb::io {

using json = nlohmann::ordered_json;

/// Malformed or schema-violating input (exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json complex_to_json(complex z);
/// Accepts a plain number or an [re, im] pair.
complex complex_from_json(const json& j, const std::string& where);

json matrix_to_json(const CMatrix& m, const std::optional<std::string>& label = std::nullopt);
/// MatrixDocument object or a bare nested array of rows.
CMatrix matrix_from_json(const json& j, const std::string& where);
/// Bare nested array of any rectangular shape (an empty array is 0 x 0).
CMatrix rect_from_json(const json& j, const std::string& where);

json rvector_to_json(const RVector& v);
RVector rvector_from_json(const json& j, const std::string& where);
CVector cvector_from_json(const json& j, const std::string& where);

/// Comma-separated reals, e.g. "1,0.5". Accepts exponent forms like 1e6.
RVector parse_real_list(const std::string& text, const std::string& where);
std::vector<long long> parse_int_list(const std::string& text, const std::string& where);

json read_json_file(const std::string& path);

/// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex(std::string_view bytes);

json tolerance_to_json(const ToleranceConfig& tol);

}  // namespace qleb::io
