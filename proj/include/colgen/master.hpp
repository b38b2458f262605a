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

// Problem-agnostic column and row generation for min-cost set packing.
//
// The master LP has one block of element rows supplied by the problem and one
// row per active triple. Columns come from a PricingProblem that, for a given
// dual vector, returns the minimum reduced-cost column per pricing task.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "colgen/column.hpp"
#include "colgen/error.hpp"
#include "colgen/lp.hpp"

namespace colgen {

struct DualView {
  std::span<const double> element;      // one per element row
  std::span<const TripleRow> triples;   // dual field holds the multiplier

  // Sum of triple duals whose row would cover a column of this kind/elements.
  double triple_term(ColumnKind kind, const std::vector<int>& sorted) const {
    double s = 0.0;
    for (const auto& t : triples) {
      if (t.dual > 0.0 && t.applies_to == kind &&
          count_members(sorted, t.members) >= 2) {
        s += t.dual;
      }
    }
    return s;
  }
};

struct PricingResult {
  std::optional<Column> column;
  double reduced_cost = 0.0;  // minimum over the task's domain
};

// Extra primal variable bounding a dual multiplier (cost = the bound).
struct SlackColumn {
  double cost = 0.0;
  std::vector<std::pair<int, double>> entries;
};

class PricingProblem {
 public:
  virtual ~PricingProblem() = default;

  virtual int num_elements() const = 0;
  virtual int num_element_rows() const = 0;
  virtual double element_rhs(int row) const = 0;
  // Coefficients of a column in the element rows.
  virtual void column_entries(const Column& q,
                              std::vector<std::pair<int, double>>& out) const = 0;
  // Throws Error{kInvalidColumn} if q is not a member of the column universe.
  virtual void validate_column(const Column& q) const = 0;

  virtual std::vector<ColumnKind> triple_kinds() const = 0;
  virtual bool triple_allowed(const TripleRow& t) const = 0;

  virtual int num_pricing_tasks() const = 0;
  virtual PricingResult price(int task, const DualView& duals) const = 0;
  // Every column of the task's domain with reduced cost <= threshold.
  // Throws Error{kInstanceTooLarge} past `limit` columns.
  virtual std::vector<Column> enumerate_task(int task, const DualView& duals,
                                             double threshold,
                                             std::size_t limit) const = 0;

  // Triple rows are offset by num_element_rows() in the master LP.
  virtual std::vector<SlackColumn> slack_columns(
      std::span<const TripleRow> /*triples*/) const {
    return {};
  }
};

struct SolveConfig {
  bool use_triples = true;
  bool use_omega_bounds = false;
  double column_violation_tol = 1e-6;
  int max_iterations = 1000;
  // Forwarded to the problem factories; the engine itself never reads it.
  double cost_offset = 0.0;
  std::uint64_t rng_seed = 0;
  int jobs = 1;
  // After convergence, enumerate every column whose reduced cost could still
  // improve the incumbent and re-solve the pool ILP. Makes the final upper
  // bound optimal; off reproduces the plain pool-ILP heuristic.
  bool close_gap = true;
  std::size_t close_gap_column_limit = 200000;
  std::int64_t ilp_node_limit = 1000000;

  void validate() const {
    if (!(column_violation_tol > 0.0)) {
      throw Error(ErrorCode::kValidationError, "column_violation_tol must be > 0");
    }
    if (max_iterations < 1) {
      throw Error(ErrorCode::kValidationError, "max_iterations must be >= 1");
    }
    if (jobs < 1) throw Error(ErrorCode::kValidationError, "jobs must be >= 1");
  }
};

struct MasterState {
  std::vector<Column> pool;
  std::vector<TripleRow> triples;
  std::vector<double> primal;        // per pool column
  std::vector<double> slack_primal;  // per slack column, empty if none
  std::vector<double> element_duals;
  double lp_objective = 0.0;
  int iteration = 0;
};

struct BoundsReport {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = 0.0;
  std::vector<int> upper_solution;  // indices into the pool
  double normalized_gap = 0.0;
  bool converged = false;
  bool iteration_limit = false;
  bool ilp_node_limit = false;
  bool upper_optimal = false;  // certified by bound match or enumeration
};

struct TraceRecord {
  int iteration = 0;
  double lp_objective = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int columns_added = 0;
  int rows_added = 0;
  double wall_time = 0.0;  // seconds since start
  double lp_duality_gap = 0.0;
  double lp_primal_residual = 0.0;
  double lp_complementarity = 0.0;
  double lp_min_reduced_cost = 0.0;
};

struct ColgenResult {
  MasterState state;
  BoundsReport bounds;
  std::vector<TraceRecord> trace;
};

inline double normalized_gap(double upper, double lower) {
  return std::abs(upper - lower) / std::max(std::abs(lower), 1e-12);
}

// -sum rhs_i * dual_i + sum over pricing tasks of min(0, minimum).
inline double compute_lower_bound(std::span<const double> rhs,
                                  std::span<const double> duals,
                                  std::span<const double> pricing_minima) {
  if (rhs.size() != duals.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "rhs and duals differ in size");
  }
  double lb = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) lb -= rhs[i] * duals[i];
  for (double m : pricing_minima) lb += std::min(0.0, m);
  return lb;
}

// Unit-rhs form: -sum duals + sum min(0, minimum).
inline double compute_lower_bound(std::span<const double> duals,
                                  std::span<const double> pricing_minima) {
  std::vector<double> ones(duals.size(), 1.0);
  return compute_lower_bound(ones, duals, pricing_minima);
}

// Master LP: element rows, then one row per triple; pool columns first, then
// slack columns when requested.
inline LinearProgram build_master(const PricingProblem& problem,
                                  std::span<const Column> pool,
                                  std::span<const TripleRow> triples,
                                  bool with_slacks) {
  LinearProgram lp;
  const int e = problem.num_element_rows();
  for (int i = 0; i < e; ++i) lp.add_row(problem.element_rhs(i));
  for (std::size_t t = 0; t < triples.size(); ++t) lp.add_row(1.0);
  std::vector<std::pair<int, double>> entries;
  for (const Column& q : pool) {
    entries.clear();
    problem.column_entries(q, entries);
    for (std::size_t t = 0; t < triples.size(); ++t) {
      if (triple_covers(triples[t], q)) {
        entries.emplace_back(e + static_cast<int>(t), 1.0);
      }
    }
    lp.add_column(q.cost, entries);
  }
  if (with_slacks) {
    for (auto& s : problem.slack_columns(triples)) {
      lp.add_column(s.cost, std::move(s.entries));
    }
  }
  return lp;
}

inline double reduced_cost(const PricingProblem& problem, const Column& q,
                           const DualView& duals) {
  std::vector<std::pair<int, double>> entries;
  problem.column_entries(q, entries);
  double rc = q.cost;
  for (const auto& [row, coef] : entries) rc += coef * duals.element[row];
  return rc + duals.triple_term(q.kind, q.elements);
}

// Appends candidates not already present. Returns the number added.
inline int add_columns(std::vector<Column>& pool, std::vector<Column> candidates,
                       const PricingProblem* problem = nullptr) {
  std::set<std::tuple<ColumnKind, std::vector<int>, std::vector<int>>> seen;
  for (const Column& q : pool) seen.emplace(q.kind, q.elements, q.global_elements);
  int added = 0;
  for (Column& q : candidates) {
    if (!seen.emplace(q.kind, q.elements, q.global_elements).second) continue;
    if (problem != nullptr) problem->validate_column(q);
    pool.push_back(std::move(q));
    ++added;
  }
  return added;
}

// True if the selection satisfies every row of lp exactly (binary values).
inline bool selection_feasible(const LinearProgram& lp,
                               std::span<const int> selection,
                               double tol = 1e-9) {
  std::vector<double> act(lp.num_rows, 0.0);
  for (int j : selection) {
    for (const auto& [row, coef] : lp.columns[j]) act[row] += coef;
  }
  for (int i = 0; i < lp.num_rows; ++i) {
    if (act[i] > lp.rhs[i] + tol) return false;
  }
  return true;
}

inline double selection_cost(const LinearProgram& lp,
                             std::span<const int> selection) {
  double c = 0.0;
  for (int j : selection) c += lp.costs[j];
  return c;
}

namespace internal {

// Pairs of columns that cannot both be 1: some row with a positive
// coefficient in each would overflow its rhs.
inline std::vector<std::vector<int>> conflict_lists(const LinearProgram& lp) {
  const int n = lp.num_vars();
  std::vector<std::vector<std::pair<int, double>>> by_row(lp.num_rows);
  for (int j = 0; j < n; ++j) {
    for (const auto& [row, coef] : lp.columns[j]) {
      if (coef > 0.0) by_row[row].emplace_back(j, coef);
    }
  }
  std::vector<std::set<int>> sets(n);
  for (int i = 0; i < lp.num_rows; ++i) {
    const auto& r = by_row[i];
    for (std::size_t a = 0; a < r.size(); ++a) {
      for (std::size_t b = a + 1; b < r.size(); ++b) {
        if (r[a].second + r[b].second > lp.rhs[i] + 1e-9) {
          sets[r[a].first].insert(r[b].first);
          sets[r[b].first].insert(r[a].first);
        }
      }
    }
  }
  std::vector<std::vector<int>> out(n);
  for (int j = 0; j < n; ++j) out[j].assign(sets[j].begin(), sets[j].end());
  return out;
}

// Drops selected columns until every row holds. Only rows that can be
// violated after pairwise-conflict-free picking are those with negative
// coefficients; removing a positive contributor fixes them.
inline void repair_selection(const LinearProgram& lp, std::vector<int>& sel) {
  while (true) {
    std::vector<double> act(lp.num_rows, 0.0);
    for (int j : sel) {
      for (const auto& [row, coef] : lp.columns[j]) act[row] += coef;
    }
    int bad = -1;
    for (int i = 0; i < lp.num_rows && bad < 0; ++i) {
      if (act[i] > lp.rhs[i] + 1e-9) bad = i;
    }
    if (bad < 0) return;
    // Remove the highest-index selected column with a positive entry there.
    int victim = -1;
    for (int j : sel) {
      for (const auto& [row, coef] : lp.columns[j]) {
        if (row == bad && coef > 0.0) victim = std::max(victim, j);
      }
    }
    sel.erase(std::find(sel.begin(), sel.end(), victim));
  }
}

}  // namespace internal

// Greedy rounding of a fractional point. Repeatedly fixes to one the column
// minimising c_q x_q - sum_{conflicting q'} c_q' x_q' (lowest index on ties)
// and zeroes its conflicts. Returns selected column indices, sorted.
inline std::vector<int> round_greedy(const LinearProgram& lp,
                                     std::span<const double> primal) {
  const int n = lp.num_vars();
  if (static_cast<int>(primal.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "primal size != num_vars");
  }
  auto conflicts = internal::conflict_lists(lp);
  std::vector<double> x(primal.begin(), primal.end());
  std::vector<char> fixed(n, 0);
  std::vector<int> sel;
  while (true) {
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int q = 0; q < n; ++q) {
      if (fixed[q] || x[q] <= 1e-9) continue;
      double score = lp.costs[q] * x[q];
      for (int r : conflicts[q]) {
        if (!fixed[r]) score -= lp.costs[r] * x[r];
      }
      if (score < best_score - 1e-12) {
        best_score = score;
        best = q;
      }
    }
    if (best < 0) break;
    fixed[best] = 1;
    x[best] = 1.0;
    sel.push_back(best);
    for (int r : conflicts[best]) {
      fixed[r] = 1;
      x[r] = 0.0;
    }
  }
  internal::repair_selection(lp, sel);
  std::sort(sel.begin(), sel.end());
  return sel;
}

struct IlpResult {
  double objective = 0.0;
  std::vector<int> selection;
  std::int64_t nodes = 0;
  bool node_limit = false;
};

namespace internal {

class BinaryBranchAndBound {
 public:
  BinaryBranchAndBound(const LinearProgram& lp, std::int64_t node_limit)
      : lp_(lp), node_limit_(node_limit), state_(lp.num_vars(), -1) {
    // A column needs an explicit x <= 1 row unless some all-nonnegative row
    // already caps it at one.
    std::vector<char> row_nonneg(lp.num_rows, 1);
    for (const auto& col : lp.columns) {
      for (const auto& [row, coef] : col) {
        if (coef < 0.0) row_nonneg[row] = 0;
      }
    }
    needs_bound_.assign(lp.num_vars(), 1);
    for (int j = 0; j < lp.num_vars(); ++j) {
      for (const auto& [row, coef] : lp.columns[j]) {
        if (coef > 0.0 && row_nonneg[row] && lp.rhs[row] / coef <= 1.0 + 1e-12) {
          needs_bound_[j] = 0;
        }
      }
    }
  }

  IlpResult run(std::vector<int> incumbent) {
    IlpResult res;
    if (!selection_feasible(lp_, incumbent)) incumbent.clear();
    best_sel_ = std::move(incumbent);
    best_ = selection_cost(lp_, best_sel_);
    dfs();
    res.objective = best_;
    res.selection = best_sel_;
    std::sort(res.selection.begin(), res.selection.end());
    res.nodes = nodes_;
    res.node_limit = nodes_ >= node_limit_;
    return res;
  }

 private:
  void dfs() {
    if (nodes_ >= node_limit_) return;
    ++nodes_;
    // Sub-LP over free variables.
    LinearProgram sub;
    double fixed_cost = 0.0;
    std::vector<double> rhs = lp_.rhs;
    std::vector<int> fixed_one;
    for (int j = 0; j < lp_.num_vars(); ++j) {
      if (state_[j] == 1) {
        fixed_cost += lp_.costs[j];
        fixed_one.push_back(j);
        for (const auto& [row, coef] : lp_.columns[j]) rhs[row] -= coef;
      }
    }
    for (double b : rhs) sub.add_row(b);
    std::vector<int> free_vars;
    for (int j = 0; j < lp_.num_vars(); ++j) {
      if (state_[j] != -1) continue;
      free_vars.push_back(j);
      auto entries = lp_.columns[j];
      if (needs_bound_[j]) entries.emplace_back(sub.add_row(1.0), 1.0);
      sub.add_column(lp_.costs[j], std::move(entries));
    }
    LpSolution s = solve(sub);
    if (s.status != LpStatus::kOptimal) return;  // infeasible fixings
    if (fixed_cost + s.objective >= best_ - 1e-9) return;
    int branch = -1;
    double frac_best = 1e-6;
    for (std::size_t k = 0; k < free_vars.size(); ++k) {
      double f = std::min(s.primal[k], 1.0 - s.primal[k]);
      if (f > frac_best + 1e-12) {
        frac_best = f;
        branch = static_cast<int>(k);
      }
    }
    if (branch < 0) {
      std::vector<int> sel = fixed_one;
      for (std::size_t k = 0; k < free_vars.size(); ++k) {
        if (s.primal[k] > 0.5) sel.push_back(free_vars[k]);
      }
      if (selection_feasible(lp_, sel)) {
        double c = selection_cost(lp_, sel);
        if (c < best_ - 1e-12) {
          best_ = c;
          best_sel_ = sel;
        }
        return;
      }
      // Rounded vertex not exactly feasible: branch on the first free variable.
      if (free_vars.empty()) return;
      branch = 0;
    }
    const int j = free_vars[branch];
    state_[j] = 1;
    dfs();
    state_[j] = 0;
    dfs();
    state_[j] = -1;
  }

  const LinearProgram& lp_;
  std::int64_t node_limit_;
  std::int64_t nodes_ = 0;
  std::vector<int> state_;  // -1 free, 0, 1
  std::vector<char> needs_bound_;
  double best_ = 0.0;
  std::vector<int> best_sel_;
};

}  // namespace internal

// Exact 0/1 optimum of lp (binary variables) by LP-bounded branch and bound.
// `start` is an optional feasible incumbent. On node-limit exhaustion the
// best known selection is returned with node_limit set.
inline IlpResult solve_binary_program(const LinearProgram& lp,
                                      std::vector<int> start = {},
                                      std::int64_t node_limit = 1000000) {
  lp.validate();
  internal::BinaryBranchAndBound bb(lp, node_limit);
  return bb.run(std::move(start));
}

// Pool ILP: the master constraints (element rows and triple rows, no slacks)
// over the pool with binary variables, seeded with greedy rounding.
inline IlpResult solve_pool_ilp(const PricingProblem& problem,
                                std::span<const Column> pool,
                                std::span<const TripleRow> triples,
                                std::span<const double> primal_hint = {},
                                std::int64_t node_limit = 1000000) {
  LinearProgram lp = build_master(problem, pool, triples, false);
  std::vector<int> start;
  if (primal_hint.size() == pool.size()) start = round_greedy(lp, primal_hint);
  return solve_binary_program(lp, std::move(start), node_limit);
}

// Triples whose activity sum_q C_cq x_q exceeds 1 + tol. Only triangles of the
// co-occurrence graph of positive columns can be violated, so only those are
// scanned. Existing rows are skipped. Output is sorted.
inline std::vector<TripleRow> find_violated_triples(
    const PricingProblem& problem, std::span<const Column> pool,
    std::span<const double> primal, std::span<const TripleRow> existing,
    double tol = 1e-6) {
  std::vector<TripleRow> out;
  for (ColumnKind kind : problem.triple_kinds()) {
    std::vector<int> active;
    for (std::size_t q = 0; q < pool.size(); ++q) {
      if (pool[q].kind == kind && primal[q] > 1e-9) active.push_back(static_cast<int>(q));
    }
    std::map<int, std::set<int>> adj;
    for (int q : active) {
      const auto& el = pool[q].elements;
      for (std::size_t a = 0; a < el.size(); ++a) {
        for (std::size_t b = a + 1; b < el.size(); ++b) {
          adj[el[a]].insert(el[b]);
          adj[el[b]].insert(el[a]);
        }
      }
    }
    for (const auto& [a, na] : adj) {
      for (int b : na) {
        if (b <= a) continue;
        for (int c : adj[b]) {
          if (c <= b || !na.count(c)) continue;
          TripleRow t = TripleRow::make(a, b, c, kind);
          if (!problem.triple_allowed(t)) continue;
          double activity = 0.0;
          for (int q : active) {
            if (count_members(pool[q].elements, t.members) >= 2) {
              activity += primal[q];
            }
          }
          if (activity <= 1.0 + tol) continue;
          if (std::find(existing.begin(), existing.end(), t) != existing.end()) {
            continue;
          }
          out.push_back(t);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const TripleRow& x, const TripleRow& y) {
    return std::tie(x.applies_to, x.members) < std::tie(y.applies_to, y.members);
  });
  return out;
}

namespace internal {

inline std::vector<PricingResult> price_all(const PricingProblem& problem,
                                            const DualView& duals, int jobs) {
  const int n = problem.num_pricing_tasks();
  std::vector<PricingResult> results(n);
  if (jobs <= 1 || n <= 1) {
    for (int t = 0; t < n; ++t) results[t] = problem.price(t, duals);
    return results;
  }
  // Strided assignment; results land in task order so output is independent
  // of the worker count.
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int t = w; t < n; t += jobs) results[t] = problem.price(t, duals);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : workers) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

inline DualView make_view(const std::vector<double>& duals, int element_rows,
                          std::vector<TripleRow>& triples) {
  for (std::size_t t = 0; t < triples.size(); ++t) {
    triples[t].dual = duals[element_rows + t];
  }
  return DualView{std::span<const double>(duals.data(), element_rows), triples};
}

}  // namespace internal

// Column/row generation loop. Rows are only generated once a full pricing
// sweep finds no violated column.
inline ColgenResult run_colgen(const PricingProblem& problem,
                               const SolveConfig& config,
                               std::vector<Column> initial_pool = {}) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  ColgenResult result;
  MasterState& st = result.state;
  BoundsReport& rep = result.bounds;
  add_columns(st.pool, std::move(initial_pool), &problem);

  const int e = problem.num_element_rows();
  const double tol = config.column_violation_tol;
  double best_upper = 0.0;  // empty selection is always feasible
  std::vector<int> best_sel;
  std::vector<double> duals;
  std::vector<double> rhs;

  while (true) {
    ++st.iteration;
    LinearProgram lp = build_master(problem, st.pool, st.triples,
                                    config.use_omega_bounds);
    LpSolution sol = solve(lp);
    if (!sol.optimal()) {
      throw Error(ErrorCode::kNumericalBreakdown, "restricted master not optimal");
    }
    const std::size_t np = st.pool.size();
    st.primal.assign(sol.primal.begin(), sol.primal.begin() + np);
    st.slack_primal.assign(sol.primal.begin() + np, sol.primal.end());
    st.lp_objective = sol.objective;
    duals = sol.duals;
    st.element_duals.assign(duals.begin(), duals.begin() + e);
    DualView view = internal::make_view(duals, e, st.triples);

    auto priced = internal::price_all(problem, view, config.jobs);
    std::vector<double> minima;
    std::vector<Column> fresh;
    for (auto& r : priced) {
      minima.push_back(r.reduced_cost);
      if (r.column && r.reduced_cost < -tol) fresh.push_back(std::move(*r.column));
    }
    rhs = lp.rhs;
    double lower = compute_lower_bound(rhs, duals, minima);
    rep.lower = std::max(rep.lower, lower);

    // Upper bound from greedy rounding of the pool part.
    LinearProgram pool_lp = build_master(problem, st.pool, st.triples, false);
    std::vector<int> sel = round_greedy(pool_lp, st.primal);
    double up = selection_cost(pool_lp, sel);
    if (up < best_upper) {
      best_upper = up;
      best_sel = sel;
    }

    TraceRecord rec;
    rec.iteration = st.iteration;
    rec.lp_objective = st.lp_objective;
    rec.lower = lower;
    rec.upper = best_upper;
    rec.lp_duality_gap = sol.duality_gap();
    rec.lp_primal_residual = sol.max_primal_residual;
    rec.lp_complementarity = sol.max_complementarity;
    rec.lp_min_reduced_cost = sol.min_reduced_cost;

    rec.columns_added = add_columns(st.pool, std::move(fresh), &problem);
    if (rec.columns_added == 0 && config.use_triples) {
      auto rows = find_violated_triples(problem, st.pool, st.primal, st.triples, tol);
      rec.rows_added = static_cast<int>(rows.size());
      for (auto& t : rows) st.triples.push_back(t);
    }
    rec.wall_time = elapsed();
    result.trace.push_back(rec);

    if (rec.columns_added == 0 && rec.rows_added == 0) {
      rep.converged = true;
      break;
    }
    if (st.iteration >= config.max_iterations) {
      rep.iteration_limit = true;
      break;
    }
  }

  // Pool ILP seeded by greedy rounding of the last LP point.
  auto run_ilp = [&](std::span<const double> hint) {
    IlpResult ilp = solve_pool_ilp(problem, st.pool, st.triples, hint,
                                   config.ilp_node_limit);
    if (ilp.node_limit) rep.ilp_node_limit = true;
    if (ilp.objective <= best_upper) {
      best_upper = ilp.objective;
      best_sel = ilp.selection;
    }
  };
  std::vector<double> hint = st.primal;
  hint.resize(st.pool.size(), 0.0);
  run_ilp(hint);

  if (rep.converged && config.close_gap &&
      best_upper - st.lp_objective > tol * (1.0 + std::abs(st.lp_objective))) {
    // Any selection cheaper than the incumbent uses only columns with reduced
    // cost below (incumbent - lp) at the converged duals.
    DualView view = internal::make_view(duals, e, st.triples);
    const int tasks = problem.num_pricing_tasks();
    const double threshold = best_upper - st.lp_objective + tasks * tol;
    std::vector<Column> extra;
    bool complete = true;
    for (int t = 0; t < tasks && complete; ++t) {
      try {
        auto cols = problem.enumerate_task(t, view, threshold,
                                           config.close_gap_column_limit);
        for (auto& c : cols) extra.push_back(std::move(c));
      } catch (const Error& err) {
        if (err.code() != ErrorCode::kInstanceTooLarge) throw;
        complete = false;
      }
    }
    if (complete && extra.size() <= config.close_gap_column_limit) {
      add_columns(st.pool, std::move(extra), &problem);
      hint.assign(st.pool.size(), 0.0);
      for (int j : best_sel) hint[j] = 1.0;
      bool was_limited = rep.ilp_node_limit;
      rep.ilp_node_limit = false;
      run_ilp(hint);
      rep.upper_optimal = !rep.ilp_node_limit;
      rep.ilp_node_limit = rep.ilp_node_limit || was_limited;
      st.primal.resize(st.pool.size(), 0.0);
    }
  } else if (rep.converged) {
    rep.upper_optimal = true;
  }

  rep.upper = best_upper;
  rep.upper_solution = best_sel;
  rep.normalized_gap = normalized_gap(rep.upper, rep.lower);
  return result;
}

}  // namespace colgen
