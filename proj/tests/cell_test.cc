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

#include "colgen/cell.hpp"

#include <gtest/gtest.h>

#include <random>

#include "colgen/exact.hpp"
#include "colgen/synthetic.hpp"
#include "oracles.hpp"

namespace colgen {
namespace {

// Three super-pixels, every pair attracts weakly; pairs cost -4, the triple -5.
CellInstance ThreeWay() {
  CellInstance c = CellInstance::make(3);
  c.max_radius = 1.0;
  c.max_area = 3.0;
  c.theta = {-7, -7, -7};
  c.cost_offset = 7.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      c.set_dist(a, b, 0.5);
      c.set_phi(a, b, 3.0);
    }
  }
  return c;
}

CellInstance Line() {
  // 0 - 1 - 2 spaced 0.6 apart, radius 1: {0,2} has no centroid.
  CellInstance c = CellInstance::make(3);
  c.max_radius = 1.0;
  c.max_area = 2.5;
  c.set_dist(0, 1, 0.6);
  c.set_dist(1, 2, 0.6);
  c.set_dist(0, 2, 1.2);
  c.theta = {-1, -2, -1};
  c.set_phi(0, 1, 0.5);
  c.set_phi(1, 2, -0.25);
  return c;
}

TEST(CellTest, CostAndValidity) {
  auto c = Line();
  EXPECT_DOUBLE_EQ(cell_cost(c, {1, 0}), -2.5);
  EXPECT_DOUBLE_EQ(cell_cost(c, {0, 1}, 2.0), -0.5);
  EXPECT_THROW(cell_cost(c, {0, 2}), Error);
  EXPECT_THROW(cell_cost(c, {0, 1, 2}), Error);  // area 3 > 2.5
  EXPECT_THROW(validate_cell(c, {}), Error);
  EXPECT_TRUE(is_centroid(c, 1, {0, 1, 2}));
  EXPECT_FALSE(is_centroid(c, 0, {0, 1, 2}));
}

TEST(CellTest, CandidateSetIsStrict) {
  auto c = Line();
  c.set_dist(0, 1, 1.0);
  EXPECT_EQ(candidate_set(c, 0), (std::vector<int>{0}));
  EXPECT_EQ(candidate_set(c, 1), (std::vector<int>{1, 2}));
}

TEST(CellTest, PricingExample) {
  auto c = Line();
  std::vector<double> lambda{0.0, 0.0, 0.0};
  auto r = price_cell(c, 1, lambda);
  // {1,2}: -3.25, {0,1}: -2.5, {1}: -2.
  EXPECT_EQ(r.column.elements, (std::vector<int>{1, 2}));
  EXPECT_DOUBLE_EQ(r.reduced_cost, -3.25);
  lambda = {0.0, 0.0, 2.0};
  r = price_cell(c, 1, lambda);
  EXPECT_EQ(r.column.elements, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(r.reduced_cost, -2.5);
}

TEST(CellTest, TooManyCandidates) {
  CellInstance c = CellInstance::make(26);
  c.max_radius = 1.0;
  c.max_area = 100.0;
  EXPECT_THROW(
      {
        try {
          price_cell(c, 0);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kCandidateSetTooLarge);
          throw;
        }
      },
      Error);
}

TEST(CellTest, OversizedSuperpixelRejected) {
  auto c = Line();
  c.area[1] = 3.0;
  EXPECT_THROW(CellProblem{c}, Error);
}

TEST(CellTest, PricingMatchesExhaustive) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    CellGenParams g;
    g.num_superpixels = 4 + trial % 7;
    auto inst = random_cell_instance(g, 1000 + trial);
    auto lambda = testing::RandomDuals(rng, inst.num_superpixels, 3.0, 0.3);
    std::vector<TripleRow> triples;
    std::uniform_int_distribution<int> pick(0, inst.num_superpixels - 1);
    for (int t = 0; t < 3; ++t) {
      int a = pick(rng), b = pick(rng), d = pick(rng);
      if (a == b || b == d || a == d) continue;
      auto row = TripleRow::make(a, b, d, ColumnKind::kCell);
      row.dual = 1.5;
      triples.push_back(row);
    }
    for (int centroid = 0; centroid < inst.num_superpixels; ++centroid) {
      auto got = price_cell(inst, centroid, lambda, triples);
      auto want = exhaustive_bqp(testing::CellPricingBqp(inst, centroid, lambda, triples));
      ASSERT_TRUE(want.feasible);
      ASSERT_NEAR(got.reduced_cost, want.value, 1e-9) << trial << " " << centroid;
      // The returned column realizes the value.
      std::vector<int> x(inst.num_superpixels, 0);
      for (int d : got.column.elements) x[d] = 1;
      auto q = testing::CellPricingBqp(inst, centroid, lambda, triples);
      EXPECT_TRUE(bqp_feasible(q, x));
      EXPECT_NEAR(bqp_value(q, x), got.reduced_cost, 1e-9);
    }
  }
}

TEST(CellTest, BranchAndBoundMatchesExhaustiveAbove16) {
  // Twenty close super-pixels force the bounded search path.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    CellGenParams g;
    g.num_superpixels = 20;
    g.side = 1.0;
    g.max_radius = 2.0;
    g.max_area = 8.0;
    auto inst = random_cell_instance(g, 77 + trial);
    auto lambda = testing::RandomDuals(rng, 20, 2.0, 0.5);
    auto got = price_cell(inst, trial, lambda);
    auto want = exhaustive_bqp(testing::CellPricingBqp(inst, trial, lambda, {}));
    EXPECT_NEAR(got.reduced_cost, want.value, 1e-9);
  }
}

TEST(CellTest, ThreeWayCounterexample) {
  auto inst = ThreeWay();
  CellProblem p(inst);
  auto u = enumerate_universe(inst);
  EXPECT_EQ(u.columns.size(), 7u);
  auto lp = build_cell_master(p, u.columns, {});
  auto sol = solve(lp);
  EXPECT_NEAR(sol.objective, -6.0, 1e-9);
  auto t = TripleRow::make(0, 1, 2, ColumnKind::kCell);
  std::vector<TripleRow> rows{t};
  EXPECT_NEAR(solve(build_cell_master(p, u.columns, rows)).objective, -5.0, 1e-9);
  EXPECT_NEAR(brute_force_setpack(p, u).value, -5.0, 1e-9);
  auto r = run_colgen(p, SolveConfig{});
  EXPECT_TRUE(r.bounds.converged);
  EXPECT_NEAR(r.bounds.upper, -5.0, 1e-9);
  EXPECT_NEAR(r.bounds.lower, -5.0, 1e-9);
}

TEST(CellTest, ColgenMatchesBruteForce) {
  for (int seed = 0; seed < 60; ++seed) {
    CellGenParams g;
    g.num_superpixels = 5 + seed % 6;
    auto inst = random_cell_instance(g, seed);
    CellProblem p(inst);
    auto r = run_colgen(p, SolveConfig{});
    auto bf = brute_force_setpack(p, enumerate_universe(inst));
    ASSERT_TRUE(r.bounds.converged) << seed;
    EXPECT_NEAR(r.bounds.upper, bf.value, 1e-6) << seed;
    EXPECT_LE(r.bounds.lower, bf.value + 1e-6) << seed;
    EXPECT_TRUE(r.bounds.upper_optimal) << seed;
  }
}

TEST(CellTest, PlantedClustersRecovered) {
  auto inst = planted_cell_instance(3, 3, 11);
  CellProblem p(inst);
  auto r = run_colgen(p, SolveConfig{});
  ASSERT_TRUE(r.bounds.converged);
  ASSERT_EQ(r.bounds.upper_solution.size(), 3u);
  for (int j : r.bounds.upper_solution) {
    const auto& el = r.state.pool[j].elements;
    ASSERT_EQ(el.size(), 3u);
    EXPECT_EQ(el[0] / 3, el[2] / 3);
  }
}

TEST(CellTest, GeneratorIsDeterministic) {
  CellGenParams g;
  auto a = random_cell_instance(g, 5), b = random_cell_instance(g, 5);
  EXPECT_EQ(a.dist, b.dist);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_NE(a.theta, random_cell_instance(g, 6).theta);
}

}  // namespace
}  // namespace colgen
