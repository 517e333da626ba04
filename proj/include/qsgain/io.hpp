// Copyright 2026 The qsgain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON model/uncertainty files and report serialization.
//
// Complex numbers are [re, im] pairs, matrices are row-major nested arrays.
// A bare number is accepted for a real entry. Infinite values are written as
// the string "inf".

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qsgain/error.hpp"
#include "qsgain/linalg.hpp"
#include "qsgain/model.hpp"
#include "qsgain/smallgain.hpp"
#include "qsgain/uncertainty.hpp"

namespace qsgain::io {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace detail {

inline ParseError semantic(const std::string& what) { return ParseError(0, 0, what); }

/// 1-based line/column of a byte offset (nlohmann reports the offset one past
/// the offending character).
inline std::pair<std::size_t, std::size_t> locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Json parse_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = locate(text, e.byte);
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": invalid JSON";
    const std::string msg = e.what();
    const auto pos = msg.find("syntax error");
    if (pos != std::string::npos) os << " (" << msg.substr(pos) << ")";
    throw ParseError(line, col, os.str());
  }
}

inline Complex parse_complex(const Json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw semantic(where + ": expected a number or [re, im]");
}

inline CMatrix parse_matrix(const Json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw semantic(field + ": expected a non-empty array of rows");
  const std::size_t rows = v.size();
  if (!v[0].is_array() || v[0].empty())
    throw semantic(field + "[0]: expected a non-empty array of entries");
  const std::size_t cols = v[0].size();
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_name = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != cols)
      throw semantic(row_name + ": expected " + std::to_string(cols) + " entries");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_complex(v[i][j], row_name + "[" + std::to_string(j) + "]");
  }
  return m;
}

inline void require_fields(const Json& doc, const std::set<std::string>& fields,
                           const std::string& kind) {
  if (!doc.is_object()) throw semantic(kind + ": top-level value must be an object");
  for (const auto& [key, value] : doc.items())
    if (!fields.count(key)) throw semantic(kind + ": unknown field \"" + key + "\"");
  for (const auto& f : fields)
    if (!doc.contains(f)) throw semantic(kind + ": missing field \"" + f + "\"");
}

inline Eigen::Index parse_count(const Json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw semantic(field + ": expected a positive integer");
  return static_cast<Eigen::Index>(v.get<long long>());
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, 0, path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline RawModel parse_raw_model(const std::string& text, const std::string& source = "<model>") {
  const Json doc = detail::parse_text(text, source);
  detail::require_fields(doc, {"n_a", "n_b", "M", "N_a", "N_b", "E_tilde"}, source);
  RawModel raw;
  raw.n_a = detail::parse_count(doc["n_a"], "n_a");
  raw.n_b = detail::parse_count(doc["n_b"], "n_b");
  raw.M = detail::parse_matrix(doc["M"], "M");
  raw.N_a = detail::parse_matrix(doc["N_a"], "N_a");
  raw.N_b = detail::parse_matrix(doc["N_b"], "N_b");
  raw.E_tilde = detail::parse_matrix(doc["E_tilde"], "E_tilde");
  return raw;
}

inline QuantumModel parse_model(const std::string& text, const std::string& source = "<model>") {
  return validate_model(parse_raw_model(text, source));
}

inline QuantumModel load_model(const std::string& path) {
  return parse_model(read_file(path), path);
}

inline LinearUncertainty parse_uncertainty(const std::string& text,
                                           const std::string& source = "<uncertainty>") {
  const Json doc = detail::parse_text(text, source);
  detail::require_fields(doc, {"A_u", "B_u", "C_u", "NoiseCov"}, source);
  return make_uncertainty(detail::parse_matrix(doc["A_u"], "A_u"),
                          detail::parse_matrix(doc["B_u"], "B_u"),
                          detail::parse_matrix(doc["C_u"], "C_u"),
                          detail::parse_matrix(doc["NoiseCov"], "NoiseCov"));
}

inline LinearUncertainty load_uncertainty(const std::string& path) {
  return parse_uncertainty(read_file(path), path);
}

// ---- writing --------------------------------------------------------------

inline OrderedJson number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

inline OrderedJson complex(Complex c) { return OrderedJson::array({number(c.real()), number(c.imag())}); }

inline OrderedJson matrix(const CMatrix& m) {
  OrderedJson rows = OrderedJson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline OrderedJson model_json(const QuantumModel& m) {
  OrderedJson j;
  j["n_a"] = m.n_a();
  j["n_b"] = m.n_b();
  j["M"] = matrix(m.M());
  j["N_a"] = matrix(m.N_a());
  j["N_b"] = matrix(m.N_b());
  j["E_tilde"] = matrix(m.E_tilde());
  return j;
}

inline OrderedJson uncertainty_json(const LinearUncertainty& u) {
  OrderedJson j;
  j["A_u"] = matrix(u.A_u);
  j["B_u"] = matrix(u.B_u);
  j["C_u"] = matrix(u.C_u);
  j["NoiseCov"] = matrix(u.NoiseCov);
  return j;
}

template <class T, class F>
OrderedJson optional_json(const std::optional<T>& v, F&& f) {
  return v ? OrderedJson(f(*v)) : OrderedJson(nullptr);
}

inline OrderedJson report_json(const CertificationReport& r) {
  OrderedJson j;
  j["verdict"] = to_string(r.verdict);
  j["hurwitz"] = r.hurwitz;
  j["abscissa"] = number(r.abscissa);
  OrderedJson eig = OrderedJson::array();
  for (Eigen::Index i = 0; i < r.f_eigenvalues.size(); ++i) eig.push_back(complex(r.f_eigenvalues(i)));
  j["f_eigenvalues"] = std::move(eig);
  j["gamma"] = number(r.gamma);
  j["delta1"] = number(r.delta1);
  j["delta2"] = number(r.delta2);
  j["hinf"] = optional_json(r.hinf, number);
  j["margin"] = optional_json(r.margin, number);
  if (r.P) {
    OrderedJson p;
    p["matrix"] = matrix(r.P->P);
    p["method"] = to_string(r.P->method);
    p["epsilon"] = number(r.P->epsilon);
    p["are_residual"] = number(r.P->are_residual);
    p["riccati_residual"] = number(r.P->riccati_residual);
    p["hermitian_residual"] = number(r.P->hermitian_residual);
    p["structure_residual"] = number(r.P->structure_residual);
    p["min_eigenvalue"] = number(r.P->min_eigenvalue);
    p["qmi_max_eigenvalue"] = number(r.P->qmi_max_eigenvalue);
    j["P"] = std::move(p);
  } else {
    j["P"] = nullptr;
  }
  j["mu"] = optional_json(r.mu, complex);
  j["mu_unscaled"] = optional_json(r.mu_unscaled, complex);
  j["mu_coefficient"] = number(kMuCoefficient);
  j["lambda_tilde"] = optional_json(r.lambda_tilde, number);
  j["delta0"] = optional_json(r.delta0, number);
  j["c_bound"] = optional_json(r.c_bound, number);
  j["warnings"] = r.warnings;
  return j;
}

/// Pretty JSON with a trailing newline.
inline std::string dump(const OrderedJson& j) { return j.dump(2) + "\n"; }

/// %.17g, with inf/nan spelled as in JSON output.
inline std::string fmt17(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt17(Complex c) {
  return fmt17(c.real()) + (c.imag() < 0 ? " - " : " + ") + fmt17(std::abs(c.imag())) + "i";
}

inline std::string report_text(const CertificationReport& r) {
  std::ostringstream os;
  auto opt = [&](const char* name, const std::optional<double>& v) {
    os << name << (v ? fmt17(*v) : std::string("n/a")) << "\n";
  };
  os << "verdict:        " << to_string(r.verdict) << "\n";
  os << "hurwitz:        " << (r.hurwitz ? "yes" : "no") << "\n";
  os << "abscissa:       " << fmt17(r.abscissa) << "\n";
  os << "F eigenvalues:\n";
  for (Eigen::Index i = 0; i < r.f_eigenvalues.size(); ++i)
    os << "  " << fmt17(r.f_eigenvalues(i)) << "\n";
  os << "gamma:          " << fmt17(r.gamma) << "\n";
  os << "delta1:         " << fmt17(r.delta1) << "\n";
  os << "delta2:         " << fmt17(r.delta2) << "\n";
  opt("hinf:           ", r.hinf);
  opt("margin:         ", r.margin);
  if (r.P) {
    os << "epsilon:        " << fmt17(r.P->epsilon) << "\n";
    os << "P method:       " << to_string(r.P->method) << "\n";
    os << "ARE residual:   " << fmt17(r.P->are_residual) << "\n";
    os << "Riccati resid.: " << fmt17(r.P->riccati_residual) << "\n";
    os << "min eig(P):     " << fmt17(r.P->min_eigenvalue) << "\n";
    os << "max eig(QMI):   " << fmt17(r.P->qmi_max_eigenvalue) << "\n";
  }
  os << "mu:             " << (r.mu ? fmt17(*r.mu) : std::string("n/a")) << "\n";
  os << "mu (unscaled):  " << (r.mu_unscaled ? fmt17(*r.mu_unscaled) : std::string("n/a")) << "\n";
  opt("lambda~:        ", r.lambda_tilde);
  opt("delta0:         ", r.delta0);
  opt("c:              ", r.c_bound);
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace qsgain::io
