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

#include "colgen/master.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "colgen/finite_universe.hpp"

namespace colgen {
namespace {

std::vector<Column> ThreeWayConflict() {
  return {make_cell_column({0, 1}, -4), make_cell_column({0, 2}, -4),
          make_cell_column({1, 2}, -4), make_cell_column({0, 1, 2}, -5)};
}

// Independent oracle: every subset of the listed columns, rows checked
// directly from the element lists.
double SubsetOptimum(int n, const std::vector<Column>& cols) {
  double best = 0.0;
  const int m = static_cast<int>(cols.size());
  for (long mask = 0; mask < (1L << m); ++mask) {
    std::vector<int> use(n, 0);
    double c = 0.0;
    bool ok = true;
    for (int q = 0; q < m && ok; ++q) {
      if (!(mask >> q & 1)) continue;
      c += cols[q].cost;
      for (int d : cols[q].elements) {
        if (++use[d] > 1) ok = false;
      }
    }
    if (ok) best = std::min(best, c);
  }
  return best;
}

std::vector<Column> RandomUniverse(std::mt19937& rng, int n, int m) {
  std::uniform_int_distribution<int> bit(0, 2), cost(-6, 2);
  std::vector<Column> cols;
  std::set<std::vector<int>> seen;
  while (static_cast<int>(cols.size()) < m) {
    std::vector<int> el;
    for (int d = 0; d < n; ++d) {
      if (bit(rng) == 0) el.push_back(d);
    }
    if (el.empty() || !seen.insert(el).second) continue;
    cols.push_back(make_cell_column(el, cost(rng)));
  }
  return cols;
}

TEST(MasterTest, CounterexampleWithoutTriplesStaysFractional) {
  FiniteUniverseProblem p(3, ThreeWayConflict());
  SolveConfig cfg;
  cfg.use_triples = false;
  cfg.close_gap = false;
  auto r = run_colgen(p, cfg);
  EXPECT_TRUE(r.bounds.converged);
  EXPECT_NEAR(r.state.lp_objective, -6.0, 1e-9);
  EXPECT_NEAR(r.bounds.lower, -6.0, 1e-9);
  EXPECT_NEAR(r.bounds.upper, -5.0, 1e-9);
}

TEST(MasterTest, CounterexampleWithTriplesClosesGap) {
  FiniteUniverseProblem p(3, ThreeWayConflict());
  auto r = run_colgen(p, SolveConfig{});
  EXPECT_TRUE(r.bounds.converged);
  ASSERT_EQ(r.state.triples.size(), 1u);
  EXPECT_EQ(r.state.triples[0].members, (std::array<int, 3>{0, 1, 2}));
  EXPECT_NEAR(r.bounds.lower, -5.0, 1e-9);
  EXPECT_NEAR(r.bounds.upper, -5.0, 1e-9);
  EXPECT_NEAR(r.bounds.normalized_gap, 0.0, 1e-12);
  ASSERT_EQ(r.bounds.upper_solution.size(), 1u);
  EXPECT_EQ(r.state.pool[r.bounds.upper_solution[0]].elements.size(), 3u);
}

TEST(MasterTest, PositiveCostsConvergeImmediately) {
  FiniteUniverseProblem p(3, {make_cell_column({0}, 1), make_cell_column({1, 2}, 2)});
  auto r = run_colgen(p, SolveConfig{});
  EXPECT_TRUE(r.bounds.converged);
  EXPECT_EQ(r.state.iteration, 1);
  EXPECT_EQ(r.bounds.upper, 0.0);
  EXPECT_TRUE(r.bounds.upper_solution.empty());
}

TEST(MasterTest, LowerBoundAtZeroDuals) {
  FiniteUniverseProblem p(3, ThreeWayConflict());
  std::vector<double> zeros(3, 0.0);
  DualView v{zeros, {}};
  std::vector<double> minima;
  for (int t = 0; t < 3; ++t) minima.push_back(p.price(t, v).reduced_cost);
  EXPECT_EQ(minima, (std::vector<double>{-5, -5, -5}));
  EXPECT_DOUBLE_EQ(compute_lower_bound(zeros, minima), -15.0);
  std::vector<double> nonneg{0.0, 2.0};
  EXPECT_DOUBLE_EQ(compute_lower_bound(zeros, nonneg), 0.0);
}

TEST(MasterTest, GreedyOnFractionalCounterexample) {
  FiniteUniverseProblem p(3, ThreeWayConflict());
  auto lp = build_master(p, p.universe(), {}, false);
  std::vector<double> x{0.5, 0.5, 0.5, 0.0};
  auto sel = round_greedy(lp, x);
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_TRUE(selection_feasible(lp, sel));
}

TEST(MasterTest, GreedyKeepsIntegralPoint) {
  FiniteUniverseProblem p(4, {make_cell_column({0, 1}, -1), make_cell_column({2}, -1),
                              make_cell_column({1, 2}, -3), make_cell_column({3}, -2)});
  auto lp = build_master(p, p.universe(), {}, false);
  std::vector<double> x{1, 1, 0, 1};
  EXPECT_EQ(round_greedy(lp, x), (std::vector<int>{0, 1, 3}));
}

TEST(MasterTest, GreedyAlwaysFeasible) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    FiniteUniverseProblem p(6, RandomUniverse(rng, 6, 10));
    auto lp = build_master(p, p.universe(), {}, false);
    std::vector<double> x(10);
    for (auto& v : x) v = u(rng) < 0.5 ? 0.0 : u(rng);
    EXPECT_TRUE(selection_feasible(lp, round_greedy(lp, x)));
  }
}

TEST(MasterTest, PoolIlpMatchesSubsetEnumeration) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto cols = RandomUniverse(rng, 7, 12);
    FiniteUniverseProblem p(7, cols);
    auto ilp = solve_pool_ilp(p, p.universe(), {});
    EXPECT_NEAR(ilp.objective, SubsetOptimum(7, cols), 1e-9) << trial;
    auto lp = build_master(p, p.universe(), {}, false);
    EXPECT_TRUE(selection_feasible(lp, ilp.selection));
    EXPECT_NEAR(selection_cost(lp, ilp.selection), ilp.objective, 1e-9);
  }
}

TEST(MasterTest, PoolIlpSingleColumn) {
  FiniteUniverseProblem p(2, {make_cell_column({0, 1}, -2)});
  auto ilp = solve_pool_ilp(p, p.universe(), {});
  EXPECT_EQ(ilp.selection, (std::vector<int>{0}));
  EXPECT_EQ(ilp.objective, -2.0);
}

TEST(MasterTest, ViolatedTriplesOnCounterexample) {
  FiniteUniverseProblem p(3, ThreeWayConflict());
  std::vector<double> x{0.5, 0.5, 0.5, 0.0};
  auto rows = find_violated_triples(p, p.universe(), x, {});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].members, (std::array<int, 3>{0, 1, 2}));
  std::vector<double> integral{0, 0, 0, 1};
  EXPECT_TRUE(find_violated_triples(p, p.universe(), integral, {}).empty());
}

TEST(MasterTest, ViolatedTriplesMatchExhaustiveScan) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 7;
    auto cols = RandomUniverse(rng, n, 12);
    FiniteUniverseProblem p(n, cols);
    auto lp = build_master(p, cols, {}, false);
    // Random feasible fractional point: scale a random vector into the rows.
    std::vector<double> x(cols.size());
    for (auto& v : x) v = u(rng) < 0.4 ? 0.0 : u(rng);
    auto act = row_activity(lp, x);
    double mx = *std::max_element(act.begin(), act.end());
    if (mx > 1.0) {
      for (auto& v : x) v /= mx;
    }
    auto got = find_violated_triples(p, cols, x, {});
    std::vector<std::array<int, 3>> want;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        for (int c = b + 1; c < n; ++c) {
          double s = 0.0;
          for (std::size_t q = 0; q < cols.size(); ++q) {
            int k = cols[q].contains(a) + cols[q].contains(b) + cols[q].contains(c);
            if (k >= 2) s += x[q];
          }
          if (s > 1.0 + 1e-6) want.push_back({a, b, c});
        }
      }
    }
    ASSERT_EQ(got.size(), want.size()) << trial;
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(got[i].members, want[i]);
  }
}

TEST(MasterTest, AddColumnsDeduplicates) {
  std::vector<Column> pool{make_cell_column({0, 1}, -1)};
  EXPECT_EQ(add_columns(pool, {make_cell_column({0, 1}, -1)}), 0);
  EXPECT_EQ(add_columns(pool, {make_cell_column({2}, -1)}), 1);
  EXPECT_EQ(add_columns(pool, {make_cell_column({3}, 0), make_cell_column({2}, -1),
                               make_cell_column({1, 3}, 0)}),
            2);
  EXPECT_EQ(pool.size(), 4u);
}

TEST(MasterTest, RandomUniversesReachOptimum) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto cols = RandomUniverse(rng, 7, 14);
    FiniteUniverseProblem p(7, cols);
    for (bool triples : {false, true}) {
      SolveConfig cfg;
      cfg.use_triples = triples;
      auto r = run_colgen(p, cfg);
      double opt = SubsetOptimum(7, cols);
      ASSERT_TRUE(r.bounds.converged);
      EXPECT_NEAR(r.bounds.upper, opt, 1e-9) << trial;
      EXPECT_LE(r.bounds.lower, opt + 1e-9);
      for (const auto& rec : r.trace) {
        EXPECT_LE(rec.lower, opt + 1e-9);
        EXPECT_GE(rec.upper, opt - 1e-9);
        EXPECT_LE(rec.lower, rec.lp_objective + 1e-9);
      }
      EXPECT_NEAR(r.trace.back().lower, r.state.lp_objective, 1e-6);
      // LP objective never increases while only columns are added.
      for (std::size_t i = 1; i < r.trace.size(); ++i) {
        if (r.trace[i - 1].rows_added == 0) {
          EXPECT_LE(r.trace[i].lp_objective, r.trace[i - 1].lp_objective + 1e-9);
        } else {
          EXPECT_GE(r.trace[i].lp_objective, r.trace[i - 1].lp_objective - 1e-9);
        }
      }
    }
  }
}

TEST(MasterTest, ParallelPricingIsDeterministic) {
  std::mt19937 rng(3);
  auto cols = RandomUniverse(rng, 8, 20);
  FiniteUniverseProblem p(8, cols);
  SolveConfig one, four;
  four.jobs = 4;
  auto a = run_colgen(p, one);
  auto b = run_colgen(p, four);
  ASSERT_EQ(a.state.pool.size(), b.state.pool.size());
  for (std::size_t i = 0; i < a.state.pool.size(); ++i) {
    EXPECT_TRUE(same_column(a.state.pool[i], b.state.pool[i]));
  }
  EXPECT_EQ(a.bounds.upper, b.bounds.upper);
  EXPECT_EQ(a.state.lp_objective, b.state.lp_objective);
}

}  // namespace
}  // namespace colgen
