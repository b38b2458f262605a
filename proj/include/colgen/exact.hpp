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

// Brute-force reference solvers for tiny instances. Slow on purpose; they
// share no search code with the pricing oracles or the pool ILP.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <tuple>
#include <utility>
#include <vector>

#include "colgen/cell.hpp"
#include "colgen/column.hpp"
#include "colgen/error.hpp"
#include "colgen/lp.hpp"
#include "colgen/pose.hpp"

namespace colgen {

enum class Provenance { kPose, kCell };

struct ColumnUniverse {
  std::vector<Column> columns;
  Provenance provenance = Provenance::kCell;
};

inline constexpr int kUniverseMaxParts = 5;
inline constexpr int kUniverseMaxPartSize = 3;
inline constexpr int kUniverseMaxSuperpixels = 12;

// Every valid global and local pose. Globals first (mixed-radix order over
// parts), then locals by part, anchor and subset.
inline ColumnUniverse enumerate_universe(const PoseInstance& inst) {
  inst.validate();
  auto by_part = inst.keypoints_by_part();
  if (inst.num_parts > kUniverseMaxParts) {
    throw Error(ErrorCode::kInstanceTooLarge, "more than 5 parts");
  }
  for (const auto& kp : by_part) {
    if (static_cast<int>(kp.size()) > kUniverseMaxPartSize) {
      throw Error(ErrorCode::kInstanceTooLarge, "more than 3 key-points in a part");
    }
  }
  ColumnUniverse u;
  u.provenance = Provenance::kPose;
  std::vector<int> digit(inst.num_parts, 0);  // 0 = part empty
  while (true) {
    std::vector<int> el;
    bool has_global = false;
    for (int r = 0; r < inst.num_parts; ++r) {
      if (digit[r] > 0) {
        el.push_back(by_part[r][digit[r] - 1]);
        has_global = has_global || inst.is_global_part(r);
      }
    }
    if (has_global) {
      std::sort(el.begin(), el.end());
      u.columns.push_back(make_global_column(inst, el, el.front(), inst.cost_offset));
    }
    int r = 0;
    while (r < inst.num_parts && ++digit[r] > static_cast<int>(by_part[r].size())) {
      digit[r++] = 0;
    }
    if (r == inst.num_parts) break;
  }
  for (int r = 0; r < inst.num_parts; ++r) {
    const auto& kp = by_part[r];
    const int k = static_cast<int>(kp.size());
    for (int a = 0; a < k; ++a) {
      for (int mask = 0; mask < (1 << k); ++mask) {
        if (!(mask >> a & 1)) continue;
        std::vector<int> el;
        for (int i = 0; i < k; ++i) {
          if (mask >> i & 1) el.push_back(kp[i]);
        }
        u.columns.push_back(make_local_column(inst, el, kp[a]));
      }
    }
  }
  return u;
}

// Every nonempty subset with a centroid and admissible area.
inline ColumnUniverse enumerate_universe(const CellInstance& inst) {
  inst.validate();
  const int n = inst.num_superpixels;
  if (n > kUniverseMaxSuperpixels) {
    throw Error(ErrorCode::kInstanceTooLarge, "more than 12 super-pixels");
  }
  ColumnUniverse u;
  u.provenance = Provenance::kCell;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> el;
    double area = 0.0;
    for (int d = 0; d < n; ++d) {
      if (mask >> d & 1) {
        el.push_back(d);
        area += inst.area[d];
      }
    }
    if (area > inst.max_area + 1e-12) continue;
    int centroid = -1;
    for (int c : el) {
      bool ok = true;
      for (int d : el) ok = ok && inst.d(c, d) < inst.max_radius;
      if (ok) {
        centroid = c;
        break;
      }
    }
    if (centroid < 0) continue;
    Column q;
    q.kind = ColumnKind::kCell;
    q.elements = el;
    q.cost = inst.cost_offset;
    for (std::size_t i = 0; i < el.size(); ++i) {
      q.cost += inst.theta[el[i]];
      for (std::size_t j = i + 1; j < el.size(); ++j) q.cost += inst.p(el[i], el[j]);
    }
    q.anchor = centroid;
    u.columns.push_back(std::move(q));
  }
  return u;
}

struct SetpackResult {
  double value = 0.0;
  std::vector<int> selection;  // sorted column indices
  std::int64_t nodes = 0;
};

inline constexpr int kSetpackMaxColumns = 4096;

namespace internal {

class SetpackSearch {
 public:
  explicit SetpackSearch(const LinearProgram& lp) : lp_(lp), n_(lp.num_vars()) {
    // Columns with a negative coefficient somewhere go first, each block by
    // ascending cost, so coupling rows are decided before their dependants.
    std::vector<char> has_neg(n_, 0);
    for (int j = 0; j < n_; ++j) {
      for (const auto& [row, coef] : lp.columns[j]) has_neg[j] |= coef < 0.0;
    }
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      if (has_neg[a] != has_neg[b]) return has_neg[a] > has_neg[b];
      return lp.costs[a] < lp.costs[b];
    });
    act_.assign(lp.num_rows, 0.0);
    // neg_left_[i]: sum of negative coefficients of undecided columns in row i.
    neg_left_.assign(lp.num_rows, 0.0);
    for (int j = 0; j < n_; ++j) {
      for (const auto& [row, coef] : lp.columns[j]) {
        if (coef < 0.0) neg_left_[row] += coef;
      }
    }
    taken_.assign(n_, 0);
  }

  SetpackResult run() {
    best_ = 0.0;  // empty selection
    best_sel_.clear();
    dfs(0, 0.0);
    SetpackResult r;
    r.value = best_;
    r.selection = best_sel_;
    std::sort(r.selection.begin(), r.selection.end());
    r.nodes = nodes_;
    return r;
  }

 private:
  // Could column j still be part of a feasible completion?
  bool viable(int j) const {
    for (const auto& [row, coef] : lp_.columns[j]) {
      if (coef > 0.0 && act_[row] + coef > lp_.rhs[row] - neg_left_[row] + 1e-9) {
        return false;
      }
    }
    return true;
  }

  bool completable() const {
    for (int i = 0; i < lp_.num_rows; ++i) {
      if (act_[i] + neg_left_[i] > lp_.rhs[i] + 1e-9) return false;
    }
    return true;
  }

  void apply(int j, double sign) {
    for (const auto& [row, coef] : lp_.columns[j]) act_[row] += sign * coef;
  }

  void settle(int j, double sign) {  // j leaves / re-enters the undecided set
    for (const auto& [row, coef] : lp_.columns[j]) {
      if (coef < 0.0) neg_left_[row] -= sign * coef;
    }
  }

  void dfs(int pos, double cur) {
    ++nodes_;
    if (!completable()) return;
    double bound = cur;
    for (int p = pos; p < n_; ++p) {
      int j = order_[p];
      if (lp_.costs[j] < 0.0 && viable(j)) bound += lp_.costs[j];
    }
    if (bound >= best_ - 1e-12) return;
    if (pos == n_) {
      for (int i = 0; i < lp_.num_rows; ++i) {
        if (act_[i] > lp_.rhs[i] + 1e-9) return;
      }
      best_ = cur;
      best_sel_.clear();
      for (int j = 0; j < n_; ++j) {
        if (taken_[j]) best_sel_.push_back(j);
      }
      return;
    }
    const int j = order_[pos];
    settle(j, +1.0);
    if (viable(j)) {
      apply(j, +1.0);
      taken_[j] = 1;
      dfs(pos + 1, cur + lp_.costs[j]);
      taken_[j] = 0;
      apply(j, -1.0);
    }
    dfs(pos + 1, cur);
    settle(j, -1.0);
  }

  const LinearProgram& lp_;
  int n_;
  std::vector<int> order_;
  std::vector<double> act_;
  std::vector<double> neg_left_;
  std::vector<char> taken_;
  double best_ = 0.0;
  std::vector<int> best_sel_;
  std::int64_t nodes_ = 0;
};

}  // namespace internal

// Exact 0/1 optimum of min c'x s.t. Ax <= b by exhaustive depth-first search
// (only pruned by cost and by rows that can no longer be satisfied).
inline SetpackResult brute_force_setpack(const LinearProgram& lp) {
  lp.validate();
  if (lp.num_vars() > kSetpackMaxColumns) {
    throw Error(ErrorCode::kInstanceTooLarge, "universe too large for brute force");
  }
  for (double b : lp.rhs) {
    if (b < 0.0) throw Error(ErrorCode::kValidationError, "brute force expects rhs >= 0");
  }
  internal::SetpackSearch s(lp);
  return s.run();
}

// Set packing over a universe with the problem's constraint families and,
// optionally, triple rows.
inline SetpackResult brute_force_setpack(const PricingProblem& problem,
                                         const ColumnUniverse& universe,
                                         std::span<const TripleRow> triples = {}) {
  return brute_force_setpack(build_master(problem, universe.columns, triples, false));
}

struct BqpInstance {
  int num_vars = 0;
  double constant = 0.0;
  std::vector<double> linear;
  std::vector<std::tuple<int, int, double>> quadratic;
  // Penalty paid when at least two of the three variables are set.
  std::vector<std::pair<std::array<int, 3>, double>> triple_terms;
  std::vector<int> fixed;  // -1 free, 0, 1; empty = all free
  std::vector<std::vector<int>> at_most_one;
  std::vector<double> weight;  // empty = no knapsack
  double capacity = std::numeric_limits<double>::infinity();
};

struct BqpResult {
  double value = std::numeric_limits<double>::infinity();
  std::vector<int> assignment;
  bool feasible = false;
};

inline constexpr int kBqpMaxFree = 20;

inline double bqp_value(const BqpInstance& q, const std::vector<int>& x) {
  double v = q.constant;
  for (int i = 0; i < q.num_vars; ++i) v += q.linear[i] * x[i];
  for (const auto& [a, b, w] : q.quadratic) v += w * x[a] * x[b];
  for (const auto& [m, w] : q.triple_terms) {
    if (x[m[0]] + x[m[1]] + x[m[2]] >= 2) v += w;
  }
  return v;
}

inline bool bqp_feasible(const BqpInstance& q, const std::vector<int>& x) {
  for (int i = 0; i < q.num_vars && !q.fixed.empty(); ++i) {
    if (q.fixed[i] >= 0 && x[i] != q.fixed[i]) return false;
  }
  for (const auto& g : q.at_most_one) {
    int s = 0;
    for (int i : g) s += x[i];
    if (s > 1) return false;
  }
  if (!q.weight.empty()) {
    double load = 0.0;
    for (int i = 0; i < q.num_vars; ++i) load += q.weight[i] * x[i];
    if (load > q.capacity + 1e-12) return false;
  }
  return true;
}

// Minimum by enumerating every assignment of the free variables.
inline BqpResult exhaustive_bqp(const BqpInstance& q) {
  if (static_cast<int>(q.linear.size()) != q.num_vars ||
      (!q.fixed.empty() && static_cast<int>(q.fixed.size()) != q.num_vars) ||
      (!q.weight.empty() && static_cast<int>(q.weight.size()) != q.num_vars)) {
    throw Error(ErrorCode::kDimensionMismatch, "bqp vector sizes");
  }
  std::vector<int> free_vars;
  for (int i = 0; i < q.num_vars; ++i) {
    if (q.fixed.empty() || q.fixed[i] < 0) free_vars.push_back(i);
  }
  if (static_cast<int>(free_vars.size()) > kBqpMaxFree) {
    throw Error(ErrorCode::kInstanceTooLarge, "more than 20 free variables");
  }
  BqpResult best;
  std::vector<int> x(q.num_vars, 0);
  for (int i = 0; i < q.num_vars; ++i) {
    if (!q.fixed.empty() && q.fixed[i] > 0) x[i] = 1;
  }
  const std::uint32_t total = 1u << free_vars.size();
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    for (std::size_t k = 0; k < free_vars.size(); ++k) x[free_vars[k]] = mask >> k & 1;
    if (!bqp_feasible(q, x)) continue;
    double v = bqp_value(q, x);
    if (v < best.value) {
      best.value = v;
      best.assignment = x;
      best.feasible = true;
    }
  }
  return best;
}

}  // namespace colgen
