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

// Cell segmentation over super-pixels. A cell is a set of super-pixels with a
// centroid member strictly within max_radius of every member and total area
// at most max_area.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "colgen/column.hpp"
#include "colgen/error.hpp"
#include "colgen/internal/group_search.hpp"
#include "colgen/master.hpp"

namespace colgen {

struct CellInstance {
  int num_superpixels = 0;
  std::vector<double> dist;  // dense n*n
  std::vector<double> area;
  double max_radius = 1.0;
  double max_area = 1.0;
  std::vector<double> theta;
  std::vector<double> phi;  // dense n*n, zero where absent
  double cost_offset = 0.0;

  static CellInstance make(int n) {
    CellInstance c;
    c.num_superpixels = n;
    c.dist.assign(static_cast<std::size_t>(n) * n, 0.0);
    c.phi.assign(static_cast<std::size_t>(n) * n, 0.0);
    c.area.assign(n, 1.0);
    c.theta.assign(n, 0.0);
    return c;
  }

  double d(int a, int b) const { return dist[static_cast<std::size_t>(a) * num_superpixels + b]; }
  double p(int a, int b) const { return phi[static_cast<std::size_t>(a) * num_superpixels + b]; }

  void set_dist(int a, int b, double v) {
    dist[static_cast<std::size_t>(a) * num_superpixels + b] = v;
    dist[static_cast<std::size_t>(b) * num_superpixels + a] = v;
  }
  void set_phi(int a, int b, double v) {
    phi[static_cast<std::size_t>(a) * num_superpixels + b] = v;
    phi[static_cast<std::size_t>(b) * num_superpixels + a] = v;
  }

  void validate() const {
    const int n = num_superpixels;
    const auto nn = static_cast<std::size_t>(n) * n;
    auto fail = [](const std::string& m) {
      throw Error(ErrorCode::kValidationError, m);
    };
    if (n < 0) fail("num_superpixels < 0");
    if (dist.size() != nn || phi.size() != nn) fail("dist/phi size");
    if (static_cast<int>(area.size()) != n || static_cast<int>(theta.size()) != n) {
      fail("area/theta size");
    }
    if (!(max_radius > 0.0) || !(max_area > 0.0)) fail("max_radius/max_area must be > 0");
    if (!std::isfinite(cost_offset)) fail("cost_offset not finite");
    for (int a = 0; a < n; ++a) {
      if (!(area[a] > 0.0) || !std::isfinite(area[a])) fail("area must be > 0");
      if (!std::isfinite(theta[a])) fail("theta not finite");
      if (d(a, a) != 0.0) fail("dist(d,d) must be 0");
      if (p(a, a) != 0.0) fail("phi(d,d) must be 0");
      for (int b = 0; b < n; ++b) {
        if (!(d(a, b) >= 0.0) || !std::isfinite(d(a, b))) fail("dist must be >= 0");
        if (d(a, b) != d(b, a)) fail("dist not symmetric");
        if (!std::isfinite(p(a, b))) fail("phi not finite");
        if (p(a, b) != p(b, a)) fail("phi not symmetric");
      }
    }
  }
};

// { d : dist(centroid, d) < max_radius }, sorted; always contains centroid.
inline std::vector<int> candidate_set(const CellInstance& inst, int centroid) {
  std::vector<int> out;
  for (int d = 0; d < inst.num_superpixels; ++d) {
    if (inst.d(centroid, d) < inst.max_radius) out.push_back(d);
  }
  return out;
}

inline bool is_centroid(const CellInstance& inst, int c,
                        const std::vector<int>& elements) {
  for (int d : elements) {
    if (!(inst.d(c, d) < inst.max_radius)) return false;
  }
  return true;
}

inline void validate_cell(const CellInstance& inst, const std::vector<int>& elements) {
  if (elements.empty()) throw Error(ErrorCode::kInvalidColumn, "empty cell");
  double a = 0.0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    int d = elements[i];
    if (d < 0 || d >= inst.num_superpixels || (i > 0 && elements[i - 1] >= d)) {
      throw Error(ErrorCode::kInvalidColumn, "cell elements must be sorted ids");
    }
    a += inst.area[d];
  }
  if (a > inst.max_area + 1e-12) {
    throw Error(ErrorCode::kInvalidColumn, "cell exceeds max_area");
  }
  for (int c : elements) {
    if (is_centroid(inst, c, elements)) return;
  }
  throw Error(ErrorCode::kInvalidColumn, "cell has no centroid");
}

// Gamma_q = sum theta + sum_{pairs} phi + offset.
inline double cell_cost(const CellInstance& inst, std::vector<int> elements,
                        double offset) {
  std::sort(elements.begin(), elements.end());
  validate_cell(inst, elements);
  double c = offset;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    c += inst.theta[elements[i]];
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      c += inst.p(elements[i], elements[j]);
    }
  }
  return c;
}

inline double cell_cost(const CellInstance& inst, std::vector<int> elements) {
  return cell_cost(inst, std::move(elements), inst.cost_offset);
}

inline constexpr int kMaxCellCandidates = 24;
inline constexpr int kExhaustiveCellCandidates = 16;

namespace internal {

// Search over subsets of candidate_set(centroid) that contain the centroid.
// Linear terms carry theta + lambda; triple penalties carry kappa.
inline GroupSearch make_cell_search(const CellInstance& inst, int centroid,
                                    std::span<const double> lambda,
                                    std::span<const TripleRow> triples,
                                    double offset, std::vector<int>& free_ids) {
  std::vector<int> cand = candidate_set(inst, centroid);
  if (static_cast<int>(cand.size()) > kMaxCellCandidates) {
    throw Error(ErrorCode::kCandidateSetTooLarge,
                std::to_string(cand.size()) + " candidates for centroid " +
                    std::to_string(centroid));
  }
  free_ids.clear();
  for (int d : cand) {
    if (d != centroid) free_ids.push_back(d);
  }
  const int k = static_cast<int>(free_ids.size());
  GroupSearch s(k);
  auto lam = [&](int d) { return lambda.empty() ? 0.0 : lambda[d]; };
  s.base = inst.theta[centroid] + lam(centroid) + offset;
  s.weight.resize(k);
  s.capacity = inst.max_area - inst.area[centroid];
  for (int i = 0; i < k; ++i) {
    int d = free_ids[i];
    s.groups.push_back({i});
    s.linear[i] = inst.theta[d] + lam(d) + inst.p(centroid, d);
    s.weight[i] = inst.area[d];
    for (int j = i + 1; j < k; ++j) s.add_pair(i, j, inst.p(d, free_ids[j]));
  }
  for (const auto& t : triples) {
    if (t.applies_to != ColumnKind::kCell || t.dual <= 0.0) continue;
    GroupSearch::Triple tr;
    tr.penalty = t.dual;
    for (int m : t.members) {
      if (m == centroid) {
        ++tr.base_count;
      } else {
        auto it = std::lower_bound(free_ids.begin(), free_ids.end(), m);
        if (it != free_ids.end() && *it == m) {
          tr.vars.push_back(static_cast<int>(it - free_ids.begin()));
        }
      }
    }
    if (tr.base_count + static_cast<int>(tr.vars.size()) >= 2) {
      s.triples.push_back(std::move(tr));
    }
  }
  s.use_bound = k + 1 > kExhaustiveCellCandidates;
  return s;
}

inline std::vector<int> with_centroid(int centroid, const std::vector<int>& chosen,
                                      const std::vector<int>& free_ids) {
  std::vector<int> el{centroid};
  for (int i : chosen) el.push_back(free_ids[i]);
  std::sort(el.begin(), el.end());
  return el;
}

}  // namespace internal

struct CellPricing {
  Column column;
  double reduced_cost = 0.0;
};

// Minimum over cells with this centroid of
//   sum (theta + lambda) x + sum phi x x + offset + sum kappa [>= 2 of c].
// Exhaustive up to 16 candidates, branch and bound above.
inline CellPricing price_cell(const CellInstance& inst, int centroid,
                              std::span<const double> lambda,
                              std::span<const TripleRow> triples, double offset) {
  if (!inst.area.empty() && inst.area[centroid] > inst.max_area + 1e-12) {
    throw Error(ErrorCode::kValidationError, "centroid alone exceeds max_area");
  }
  std::vector<int> free_ids;
  auto s = internal::make_cell_search(inst, centroid, lambda, triples, offset, free_ids);
  auto best = s.minimize();
  CellPricing out;
  out.column.kind = ColumnKind::kCell;
  out.column.elements = internal::with_centroid(centroid, best.chosen, free_ids);
  out.column.cost = cell_cost(inst, out.column.elements, offset);
  out.column.anchor = centroid;
  out.reduced_cost = best.value;
  return out;
}

inline CellPricing price_cell(const CellInstance& inst, int centroid,
                              std::span<const double> lambda = {},
                              std::span<const TripleRow> triples = {}) {
  return price_cell(inst, centroid, lambda, triples, inst.cost_offset);
}

class CellProblem : public PricingProblem {
 public:
  explicit CellProblem(CellInstance inst) : inst_(std::move(inst)) {
    inst_.validate();
    for (int d = 0; d < inst_.num_superpixels; ++d) {
      if (inst_.area[d] > inst_.max_area + 1e-12) {
        throw Error(ErrorCode::kValidationError,
                    "super-pixel " + std::to_string(d) + " exceeds max_area");
      }
    }
  }

  const CellInstance& instance() const { return inst_; }

  int num_elements() const override { return inst_.num_superpixels; }
  int num_element_rows() const override { return inst_.num_superpixels; }
  double element_rhs(int) const override { return 1.0; }

  void column_entries(const Column& q,
                      std::vector<std::pair<int, double>>& out) const override {
    for (int d : q.elements) out.emplace_back(d, 1.0);
  }

  void validate_column(const Column& q) const override {
    if (q.kind != ColumnKind::kCell || !q.global_elements.empty()) {
      throw Error(ErrorCode::kInvalidColumn, "not a cell column");
    }
    validate_cell(inst_, q.elements);
  }

  std::vector<ColumnKind> triple_kinds() const override { return {ColumnKind::kCell}; }
  bool triple_allowed(const TripleRow& t) const override {
    return t.applies_to == ColumnKind::kCell;
  }

  int num_pricing_tasks() const override { return inst_.num_superpixels; }

  PricingResult price(int task, const DualView& duals) const override {
    auto r = price_cell(inst_, task, duals.element, duals.triples, inst_.cost_offset);
    return PricingResult{std::move(r.column), r.reduced_cost};
  }

  std::vector<Column> enumerate_task(int task, const DualView& duals,
                                     double threshold,
                                     std::size_t limit) const override {
    std::vector<int> free_ids;
    auto s = internal::make_cell_search(inst_, task, duals.element, duals.triples,
                                        inst_.cost_offset, free_ids);
    std::vector<Column> out;
    s.enumerate(threshold, limit, [&](double, const std::vector<int>& chosen) {
      Column q;
      q.kind = ColumnKind::kCell;
      q.elements = internal::with_centroid(task, chosen, free_ids);
      q.cost = cell_cost(inst_, q.elements, inst_.cost_offset);
      q.anchor = task;
      out.push_back(std::move(q));
    });
    return out;
  }

 private:
  CellInstance inst_;
};

inline LinearProgram build_cell_master(const CellProblem& problem,
                                       std::span<const Column> pool,
                                       std::span<const TripleRow> triples) {
  return build_master(problem, pool, triples, false);
}

}  // namespace colgen
