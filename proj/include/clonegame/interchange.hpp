// Copyright 2026 The clonegame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON interchange for layouts, operators and states:
//
//   {"layout": [["R", 2], ["P0", 2]], "entries": [[re, im], ...]}
//
// Operators flatten row-major (dim*dim pairs); states list dim pairs.

#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "clonegame/tensor_core.hpp"

namespace clonegame {

using json = nlohmann::json;

/// `x` rounded to 12 significant digits, the precision of every report.
inline double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline json layout_to_json(const RegisterLayout &layout) {
  json out = json::array();
  for (const auto &r : layout) out.push_back(json::array({r.label, r.dim}));
  return out;
}

inline RegisterLayout layout_from_json(const json &j) {
  if (!j.is_array()) throw ContractError("layout must be an array of [label, dim] pairs");
  std::vector<Register> regs;
  for (const auto &e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number_integer() || e[1].get<long long>() < 1)
      throw ContractError("layout entries must be [label, positive dim]");
    regs.push_back({e[0].get<std::string>(), e[1].get<std::size_t>()});
  }
  return RegisterLayout(std::move(regs));
}

inline json complex_to_json(cplx z, bool round = true) {
  return json::array({round ? round12(z.real()) : z.real(), round ? round12(z.imag()) : z.imag()});
}

inline cplx complex_from_json(const json &j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ContractError("complex numbers are serialized as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

/// `round` trims entries to 12 significant digits (report output); files meant
/// to be read back losslessly pass false.
inline json to_json(const Operator &m, bool round = false) {
  json entries = json::array();
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) entries.push_back(complex_to_json(m(r, c), round));
  return {{"layout", layout_to_json(m.layout())}, {"entries", entries}};
}

inline json to_json(const StateVector &v, bool round = false) {
  json entries = json::array();
  for (std::size_t i = 0; i < v.dim(); ++i) entries.push_back(complex_to_json(v[i], round));
  return {{"layout", layout_to_json(v.layout())}, {"entries", entries}};
}

inline Operator operator_from_json(const json &j) {
  if (!j.is_object() || !j.contains("layout") || !j.contains("entries"))
    throw ContractError("operator JSON needs \"layout\" and \"entries\"");
  RegisterLayout layout = layout_from_json(j.at("layout"));
  const std::size_t d = layout.dim();
  check_dimension(d, "operator");
  const json &e = j.at("entries");
  if (!e.is_array() || e.size() != d * d)
    throw ContractError("operator entries must hold dim*dim = " + std::to_string(d * d) + " values");
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(e[r * d + c]);
  return Operator(std::move(layout), std::move(m));
}

inline StateVector state_from_json(const json &j) {
  if (!j.is_object() || !j.contains("layout") || !j.contains("entries"))
    throw ContractError("state JSON needs \"layout\" and \"entries\"");
  RegisterLayout layout = layout_from_json(j.at("layout"));
  const std::size_t d = layout.dim();
  check_dimension(d, "state vector");
  const json &e = j.at("entries");
  if (!e.is_array() || e.size() != d) throw ContractError("state entries must hold dim = " + std::to_string(d) + " values");
  Vector v(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(e[i]);
  return StateVector(std::move(layout), std::move(v));
}

/// Accepts either a density operator (dim*dim entries) or a pure state (dim
/// entries, promoted to its projector).
inline Operator density_from_json(const json &j) {
  if (j.is_object() && j.contains("layout") && j.contains("entries")) {
    const std::size_t d = layout_from_json(j.at("layout")).dim();
    if (j.at("entries").size() == d && d != 1) return state_from_json(j).density();
  }
  return operator_from_json(j);
}

inline json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw ContractError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace clonegame
