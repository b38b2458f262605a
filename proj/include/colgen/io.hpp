// Copyright 2026 The colgen Authors
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

// JSON instance, report and region files. Field names are listed in
// README.md; unknown fields are rejected.

#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "colgen/cell.hpp"
#include "colgen/evalmetrics.hpp"
#include "colgen/master.hpp"
#include "colgen/pose.hpp"
#include "json.hpp"

namespace colgen {

using Json = nlohmann::json;

namespace internal {

[[noreturn]] inline void parse_fail(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kParseError, "field '" + field + "': " + why);
}

inline void check_keys(const Json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) parse_fail(where.empty() ? k : where + "." + k, "unknown field");
  }
}

inline const Json& need(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) parse_fail(key, "missing");
  return *it;
}

inline double as_real(const Json& v, const std::string& field) {
  if (!v.is_number()) parse_fail(field, "expected a number");
  return v.get<double>();
}

inline int as_int(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) parse_fail(field, "expected an integer");
  return v.get<int>();
}

inline bool as_bool(const Json& v, const std::string& field) {
  if (!v.is_boolean()) parse_fail(field, "expected true/false");
  return v.get<bool>();
}

inline const Json& as_array(const Json& v, const std::string& field) {
  if (!v.is_array()) parse_fail(field, "expected an array");
  return v;
}

inline std::vector<double> real_list(const Json& v, const std::string& field) {
  std::vector<double> out;
  for (const auto& x : as_array(v, field)) out.push_back(as_real(x, field));
  return out;
}

inline std::vector<int> int_list(const Json& v, const std::string& field) {
  std::vector<int> out;
  for (const auto& x : as_array(v, field)) out.push_back(as_int(x, field));
  return out;
}

inline int checked_id(const Json& v, int n, const std::string& field) {
  int id = as_int(v, field);
  if (id < 0 || id >= n) {
    throw Error(ErrorCode::kValidationError, "field '" + field + "': id " +
                                                 std::to_string(id) + " out of range");
  }
  return id;
}

// Sparse [a, b, value] entries; both orders may be given if they agree.
template <typename Set>
void read_phi(const Json& v, int n, Set&& set) {
  std::map<std::pair<int, int>, double> seen;
  for (const auto& e : as_array(v, "phi")) {
    if (!e.is_array() || e.size() != 3) parse_fail("phi", "entries are [a, b, value]");
    int a = checked_id(e[0], n, "phi"), b = checked_id(e[1], n, "phi");
    double w = as_real(e[2], "phi");
    if (a == b) throw Error(ErrorCode::kValidationError, "field 'phi': diagonal entry");
    auto key = std::minmax(a, b);
    auto it = seen.find(key);
    if (it != seen.end() && it->second != w) {
      throw Error(ErrorCode::kValidationError,
                  "field 'phi': not symmetric at (" + std::to_string(a) + "," +
                      std::to_string(b) + ")");
    }
    seen[key] = w;
    set(a, b, w);
  }
}

inline Json phi_entries(int n, const std::vector<double>& phi) {
  Json out = Json::array();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double w = phi[static_cast<std::size_t>(a) * n + b];
      if (w != 0.0) out.push_back({a, b, w});
    }
  }
  return out;
}

inline ColumnKind kind_from_string(const std::string& s, const std::string& field) {
  for (auto k : {ColumnKind::kGlobalPose, ColumnKind::kLocalPose, ColumnKind::kCell}) {
    if (to_string(k) == s) return k;
  }
  parse_fail(field, "unknown kind '" + s + "'");
}

}  // namespace internal

inline Json to_json(const PoseInstance& p) {
  Json j;
  j["problem"] = "pose";
  if (p.part_names.empty()) {
    j["parts"] = p.num_parts;
  } else {
    j["parts"] = p.part_names;
  }
  j["part_of"] = p.part_of;
  j["global_parts"] = p.global_parts;
  j["root_part"] = p.root_part;
  Json tree = Json::array();
  for (auto [a, b] : p.part_tree) tree.push_back({a, b});
  j["part_tree"] = tree;
  j["theta"] = p.theta;
  j["phi"] = internal::phi_entries(p.num_keypoints, p.phi);
  if (p.cost_offset != 0.0) j["cost_offset"] = p.cost_offset;
  return j;
}

inline Json to_json(const CellInstance& c) {
  Json j;
  j["problem"] = "cell";
  const int n = c.num_superpixels;
  Json dist = Json::array();
  for (int a = 0; a < n; ++a) {
    Json row = Json::array();
    for (int b = 0; b < n; ++b) row.push_back(c.d(a, b));
    dist.push_back(row);
  }
  j["dist"] = dist;
  j["area"] = c.area;
  j["max_radius"] = c.max_radius;
  j["max_area"] = c.max_area;
  j["theta"] = c.theta;
  j["phi"] = internal::phi_entries(n, c.phi);
  if (c.cost_offset != 0.0) j["cost_offset"] = c.cost_offset;
  return j;
}

inline PoseInstance pose_from_json(const Json& j) {
  using namespace internal;
  check_keys(j, "", {"problem", "parts", "part_of", "global_parts", "root_part", "part_tree",
                     "theta", "phi", "cost_offset"});
  const Json& parts = need(j, "parts");
  std::vector<std::string> names;
  int num_parts = 0;
  if (parts.is_array()) {
    for (const auto& s : parts) {
      if (!s.is_string()) parse_fail("parts", "expected part names");
      names.push_back(s.get<std::string>());
    }
    num_parts = static_cast<int>(names.size());
  } else {
    num_parts = as_int(parts, "parts");
  }
  if (num_parts < 1) throw Error(ErrorCode::kValidationError, "field 'parts': need >= 1 part");
  const Json& part_of = as_array(need(j, "part_of"), "part_of");
  const int n = static_cast<int>(part_of.size());
  PoseInstance p = PoseInstance::make(n, num_parts);
  p.part_names = std::move(names);
  for (int d = 0; d < n; ++d) p.part_of[d] = checked_id(part_of[d], num_parts, "part_of");
  p.global_parts = int_list(need(j, "global_parts"), "global_parts");
  std::sort(p.global_parts.begin(), p.global_parts.end());
  p.root_part = j.contains("root_part") ? as_int(j["root_part"], "root_part") : 0;
  for (const auto& e : as_array(need(j, "part_tree"), "part_tree")) {
    if (!e.is_array() || e.size() != 2) parse_fail("part_tree", "edges are [a, b]");
    p.part_tree.emplace_back(as_int(e[0], "part_tree"), as_int(e[1], "part_tree"));
  }
  p.theta = real_list(need(j, "theta"), "theta");
  if (static_cast<int>(p.theta.size()) != n) {
    throw Error(ErrorCode::kValidationError, "field 'theta': length differs from part_of");
  }
  read_phi(need(j, "phi"), n, [&](int a, int b, double w) { p.set_phi(a, b, w); });
  if (j.contains("cost_offset")) p.cost_offset = as_real(j["cost_offset"], "cost_offset");
  p.validate();
  return p;
}

inline CellInstance cell_from_json(const Json& j) {
  using namespace internal;
  check_keys(j, "", {"problem", "dist", "area", "max_radius", "max_area", "theta", "phi",
                     "cost_offset"});
  const Json& dist = as_array(need(j, "dist"), "dist");
  const int n = static_cast<int>(dist.size());
  CellInstance c = CellInstance::make(n);
  for (int a = 0; a < n; ++a) {
    auto row = real_list(dist[a], "dist");
    if (static_cast<int>(row.size()) != n) {
      throw Error(ErrorCode::kValidationError, "field 'dist': not a square matrix");
    }
    for (int b = 0; b < n; ++b) c.dist[static_cast<std::size_t>(a) * n + b] = row[b];
  }
  c.area = real_list(need(j, "area"), "area");
  c.theta = real_list(need(j, "theta"), "theta");
  if (static_cast<int>(c.area.size()) != n || static_cast<int>(c.theta.size()) != n) {
    throw Error(ErrorCode::kValidationError, "fields 'area'/'theta': length differs from dist");
  }
  c.max_radius = as_real(need(j, "max_radius"), "max_radius");
  c.max_area = as_real(need(j, "max_area"), "max_area");
  read_phi(need(j, "phi"), n, [&](int a, int b, double w) { c.set_phi(a, b, w); });
  if (j.contains("cost_offset")) c.cost_offset = as_real(j["cost_offset"], "cost_offset");
  c.validate();
  return c;
}

using Instance = std::variant<PoseInstance, CellInstance>;

inline Instance instance_from_json(const Json& j) {
  if (!j.is_object()) internal::parse_fail("", "expected an object");
  auto it = j.find("problem");
  if (it == j.end() || !it->is_string()) internal::parse_fail("problem", "missing");
  const std::string kind = it->get<std::string>();
  if (kind == "pose") return pose_from_json(j);
  if (kind == "cell") return cell_from_json(j);
  internal::parse_fail("problem", "expected 'pose' or 'cell'");
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write " + path);
  out << j.dump(2) << "\n";
}

inline Instance parse_instance(const std::string& path) {
  return instance_from_json(read_json_file(path));
}

// Result of a run in file form.
struct SolveReport {
  std::string problem;
  double objective = 0.0;  // the upper bound's value
  double lower = 0.0;
  double upper = 0.0;
  double normalized_gap = 0.0;
  double lp_objective = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
  bool converged = false;
  bool iteration_limit = false;
  bool upper_optimal = false;
  std::vector<Column> solution;
  std::vector<TripleRow> triples;
  std::vector<TraceRecord> trace;
};

inline SolveReport make_report(const std::string& problem, const ColgenResult& r) {
  SolveReport s;
  s.problem = problem;
  s.objective = r.bounds.upper;
  s.lower = r.bounds.lower;
  s.upper = r.bounds.upper;
  s.normalized_gap = r.bounds.normalized_gap;
  s.lp_objective = r.state.lp_objective;
  s.iterations = r.state.iteration;
  s.wall_time = r.trace.empty() ? 0.0 : r.trace.back().wall_time;
  s.converged = r.bounds.converged;
  s.iteration_limit = r.bounds.iteration_limit;
  s.upper_optimal = r.bounds.upper_optimal;
  for (int j : r.bounds.upper_solution) s.solution.push_back(r.state.pool[j]);
  s.triples = r.state.triples;
  s.trace = r.trace;
  return s;
}

inline Json to_json(const Column& q) {
  return Json{{"kind", std::string(to_string(q.kind))},
              {"elements", q.elements},
              {"global_elements", q.global_elements},
              {"cost", q.cost},
              {"anchor", q.anchor}};
}

inline Json to_json(const SolveReport& s) {
  Json j;
  j["problem"] = s.problem;
  j["objective"] = s.objective;
  j["lower"] = s.lower;
  j["upper"] = s.upper;
  j["normalized_gap"] = s.normalized_gap;
  j["lp_objective"] = s.lp_objective;
  j["iterations"] = s.iterations;
  j["wall_time"] = s.wall_time;
  j["converged"] = s.converged;
  j["iteration_limit"] = s.iteration_limit;
  j["upper_optimal"] = s.upper_optimal;
  Json cols = Json::array();
  for (const auto& q : s.solution) cols.push_back(to_json(q));
  j["solution"] = cols;
  Json rows = Json::array();
  for (const auto& t : s.triples) {
    rows.push_back({{"members", t.members},
                    {"applies_to", std::string(to_string(t.applies_to))},
                    {"dual", t.dual}});
  }
  j["triples"] = rows;
  Json trace = Json::array();
  for (const auto& t : s.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"lp_objective", t.lp_objective},
                     {"lower", t.lower},
                     {"upper", t.upper},
                     {"columns_added", t.columns_added},
                     {"rows_added", t.rows_added},
                     {"wall_time", t.wall_time},
                     {"lp_duality_gap", t.lp_duality_gap},
                     {"lp_primal_residual", t.lp_primal_residual},
                     {"lp_complementarity", t.lp_complementarity},
                     {"lp_min_reduced_cost", t.lp_min_reduced_cost}});
  }
  j["trace"] = trace;
  return j;
}

inline SolveReport report_from_json(const Json& j) {
  using namespace internal;
  check_keys(j, "", {"problem", "objective", "lower", "upper", "normalized_gap",
                     "lp_objective", "iterations", "wall_time", "converged",
                     "iteration_limit", "upper_optimal", "solution", "triples", "trace"});
  SolveReport s;
  if (!need(j, "problem").is_string()) parse_fail("problem", "expected a string");
  s.problem = j["problem"].get<std::string>();
  s.objective = as_real(need(j, "objective"), "objective");
  s.lower = as_real(need(j, "lower"), "lower");
  s.upper = as_real(need(j, "upper"), "upper");
  s.normalized_gap = as_real(need(j, "normalized_gap"), "normalized_gap");
  s.lp_objective = as_real(need(j, "lp_objective"), "lp_objective");
  s.iterations = as_int(need(j, "iterations"), "iterations");
  s.wall_time = as_real(need(j, "wall_time"), "wall_time");
  s.converged = as_bool(need(j, "converged"), "converged");
  s.iteration_limit = as_bool(need(j, "iteration_limit"), "iteration_limit");
  s.upper_optimal = as_bool(need(j, "upper_optimal"), "upper_optimal");
  for (const auto& c : as_array(need(j, "solution"), "solution")) {
    check_keys(c, "solution", {"kind", "elements", "global_elements", "cost", "anchor"});
    Column q;
    if (!need(c, "kind").is_string()) parse_fail("solution.kind", "expected a string");
    q.kind = kind_from_string(c["kind"].get<std::string>(), "solution.kind");
    q.elements = int_list(need(c, "elements"), "solution.elements");
    q.global_elements = int_list(need(c, "global_elements"), "solution.global_elements");
    q.cost = as_real(need(c, "cost"), "solution.cost");
    q.anchor = as_int(need(c, "anchor"), "solution.anchor");
    s.solution.push_back(std::move(q));
  }
  for (const auto& t : as_array(need(j, "triples"), "triples")) {
    check_keys(t, "triples", {"members", "applies_to", "dual"});
    auto m = int_list(need(t, "members"), "triples.members");
    if (m.size() != 3) parse_fail("triples.members", "expected 3 ids");
    if (!need(t, "applies_to").is_string()) parse_fail("triples.applies_to", "expected a string");
    TripleRow row = TripleRow::make(m[0], m[1], m[2],
                                    kind_from_string(t["applies_to"].get<std::string>(),
                                                     "triples.applies_to"));
    row.dual = as_real(need(t, "dual"), "triples.dual");
    s.triples.push_back(row);
  }
  for (const auto& t : as_array(need(j, "trace"), "trace")) {
    check_keys(t, "trace", {"iteration", "lp_objective", "lower", "upper", "columns_added",
                            "rows_added", "wall_time", "lp_duality_gap",
                            "lp_primal_residual", "lp_complementarity",
                            "lp_min_reduced_cost"});
    TraceRecord r;
    r.iteration = as_int(need(t, "iteration"), "trace.iteration");
    r.lp_objective = as_real(need(t, "lp_objective"), "trace.lp_objective");
    r.lower = as_real(need(t, "lower"), "trace.lower");
    r.upper = as_real(need(t, "upper"), "trace.upper");
    r.columns_added = as_int(need(t, "columns_added"), "trace.columns_added");
    r.rows_added = as_int(need(t, "rows_added"), "trace.rows_added");
    r.wall_time = as_real(need(t, "wall_time"), "trace.wall_time");
    r.lp_duality_gap = as_real(need(t, "lp_duality_gap"), "trace.lp_duality_gap");
    r.lp_primal_residual = as_real(need(t, "lp_primal_residual"), "trace.lp_primal_residual");
    r.lp_complementarity = as_real(need(t, "lp_complementarity"), "trace.lp_complementarity");
    r.lp_min_reduced_cost =
        as_real(need(t, "lp_min_reduced_cost"), "trace.lp_min_reduced_cost");
    s.trace.push_back(r);
  }
  return s;
}

// {"regions": [{"centroid": [x, y], "elements": [...]}, ...]}
inline std::vector<Region> regions_from_json(const Json& j) {
  using namespace internal;
  check_keys(j, "", {"regions"});
  std::vector<Region> out;
  for (const auto& r : as_array(need(j, "regions"), "regions")) {
    check_keys(r, "regions", {"centroid", "elements"});
    Region g;
    g.centroid = real_list(need(r, "centroid"), "regions.centroid");
    g.elements = int_list(need(r, "elements"), "regions.elements");
    out.push_back(std::move(g));
  }
  return out;
}

inline Json to_json(const std::vector<Region>& regions) {
  Json arr = Json::array();
  for (const auto& r : regions) arr.push_back({{"centroid", r.centroid}, {"elements", r.elements}});
  return Json{{"regions", arr}};
}

}  // namespace colgen
