#include "json_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qleb::io {

json complex_to_json(complex z) { return json::array({z.real(), z.imag()}); }

complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw InputError(where + ": expected a number or an [re, im] pair");
}

json matrix_to_json(const CMatrix& m, const std::optional<std::string>& label) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  json doc;
  doc["dim"] = m.rows();
  doc["entries"] = std::move(rows);
  if (label) doc["label"] = *label;
  return doc;
}

CMatrix rect_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (rows == 0) return CMatrix(0, 0);
  if (!j[0].is_array()) throw InputError(where + ": row 0 is not an array");
  const auto cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw InputError(where + ": row " + std::to_string(i) + " has the wrong length");
    }
    for (Index k = 0; k < cols; ++k) {
      m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)],
                                  where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }
  return m;
}

CMatrix matrix_from_json(const json& j, const std::string& where) {
  CMatrix m;
  if (j.is_object()) {
    if (!j.contains("entries")) throw InputError(where + ": missing \"entries\"");
    m = rect_from_json(j["entries"], where + ".entries");
    if (j.contains("dim")) {
      if (!j["dim"].is_number_integer() || j["dim"].get<long long>() != m.rows()) {
        throw InputError(where + ": \"dim\" does not match the entries");
      }
    }
  } else {
    m = rect_from_json(j, where);
  }
  if (m.rows() < 1 || m.rows() != m.cols()) throw InputError(where + ": expected a non-empty square matrix");
  return m;
}

json rvector_to_json(const RVector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

RVector rvector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of numbers");
  RVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(where + "[" + std::to_string(i) + "]: expected a number");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

CVector cvector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  CVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = complex_from_json(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

RVector parse_real_list(const std::string& text, const std::string& where) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError(where + ": '" + item + "' is not a number");
    }
    if (used != item.size() || !std::isfinite(v)) throw InputError(where + ": '" + item + "' is not a number");
    vals.push_back(v);
  }
  if (vals.empty()) throw InputError(where + ": empty list");
  return Eigen::Map<RVector>(vals.data(), static_cast<Index>(vals.size()));
}

std::vector<long long> parse_int_list(const std::string& text, const std::string& where) {
  const RVector r = parse_real_list(text, where);
  std::vector<long long> out;
  for (Index i = 0; i < r.size(); ++i) {
    if (r(i) < 1.0 || r(i) > 9e18 || r(i) != std::floor(r(i))) {
      throw InputError(where + ": entries must be positive integers");
    }
    out.push_back(static_cast<long long>(r(i)));
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json tolerance_to_json(const ToleranceConfig& tol) {
  json t;
  t["hermitian"] = tol.hermitian;
  t["rank_rel"] = tol.rank_rel;
  t["psd_floor"] = tol.psd_floor;
  t["recon"] = tol.recon;
  t["ortho"] = tol.ortho;
  t["eq_rel"] = tol.eq_rel;
  return t;
}

}  // namespace qleb::io
