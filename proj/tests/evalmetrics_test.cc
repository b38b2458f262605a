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

#include "colgen/evalmetrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

namespace colgen {
namespace {

// Minimum over injective maps from the smaller side, by permutation.
double PermutationOptimum(const std::vector<std::vector<double>>& c) {
  const int r = static_cast<int>(c.size()), k = static_cast<int>(c[0].size());
  const bool flip = r > k;
  const int small = std::min(r, k), big = std::max(r, k);
  std::vector<int> perm(big);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double s = 0.0;
    for (int i = 0; i < small; ++i) s += flip ? c[perm[i]][i] : c[i][perm[i]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TEST(EvalMetricsTest, HungarianSmallCases) {
  auto a = hungarian({{1, 9, 9}, {9, 1, 9}, {9, 9, 1}});
  EXPECT_EQ(a.pairs, (std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}}));
  EXPECT_DOUBLE_EQ(a.cost, 3.0);
  auto b = hungarian({{4.5}});
  EXPECT_EQ(b.pairs, (std::vector<std::pair<int, int>>{{0, 0}}));
  EXPECT_THROW(hungarian({}), Error);
  EXPECT_THROW(hungarian({{}}), Error);
  EXPECT_THROW(hungarian({{1, 2}, {3}}), Error);
}

TEST(EvalMetricsTest, HungarianMatchesPermutations) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> val(-5.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    int r = dim(rng), k = dim(rng);
    std::vector<std::vector<double>> c(r, std::vector<double>(k));
    for (auto& row : c) {
      for (auto& x : row) x = val(rng);
    }
    auto got = hungarian(c);
    ASSERT_EQ(static_cast<int>(got.pairs.size()), std::min(r, k));
    std::vector<char> ru(r, 0), cu(k, 0);
    for (auto [i, j] : got.pairs) {
      EXPECT_FALSE(ru[i]++);
      EXPECT_FALSE(cu[j]++);
    }
    EXPECT_NEAR(got.cost, PermutationOptimum(c), 1e-9) << trial;
  }
}

TEST(EvalMetricsTest, PrfExamples) {
  auto a = prf(10, 0, 0);
  EXPECT_EQ(a.precision, 1.0);
  EXPECT_EQ(a.recall, 1.0);
  EXPECT_EQ(a.f_score, 1.0);
  auto b = prf(0, 5, 5);
  EXPECT_EQ(b.precision, 0.0);
  EXPECT_EQ(b.recall, 0.0);
  EXPECT_EQ(b.f_score, 0.0);
  auto c = prf(3, 1, 2);
  EXPECT_DOUBLE_EQ(c.precision, 0.75);
  EXPECT_DOUBLE_EQ(c.recall, 0.6);
  EXPECT_DOUBLE_EQ(c.f_score, 2 * 0.75 * 0.6 / 1.35);
  auto z = prf(0, 0, 0);
  EXPECT_EQ(z.f_score, 0.0);
  auto k = prf(30, 10, 20);
  EXPECT_DOUBLE_EQ(k.precision, c.precision);
  EXPECT_DOUBLE_EQ(k.recall, c.recall);
  EXPECT_DOUBLE_EQ(k.f_score, c.f_score);
}

TEST(EvalMetricsTest, JaccardExamples) {
  EXPECT_EQ(jaccard({1, 2, 3}, {3, 2, 1}), 1.0);
  EXPECT_EQ(jaccard({1}, {2}), 0.0);
  EXPECT_EQ(jaccard({1, 2, 3}, {2, 3, 4}), 0.5);
  EXPECT_EQ(jaccard({}, {}), 0.0);
}

std::vector<Region> ThreeGt() {
  return {{{0, 0}, {0, 1, 2, 3}}, {{10, 0}, {4, 5}}, {{20, 0}, {6, 7, 8}}};
}

TEST(EvalMetricsTest, HandBuiltThreeRegions) {
  std::vector<Region> pred{{{0.5, 0}, {0, 1, 2}}, {{10, 1}, {4, 5, 9}}, {{30, 0}, {10}}};
  auto r = evaluate_regions(pred, ThreeGt(), 2.0);
  EXPECT_EQ(r.tp, 2);
  EXPECT_EQ(r.fp, 1);
  EXPECT_EQ(r.fn, 1);
  EXPECT_DOUBLE_EQ(r.scores.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.scores.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.mean_jaccard, (0.75 + 2.0 / 3.0) / 2.0);
  EXPECT_EQ(r.match.unmatched_predictions, std::vector<int>{2});
  EXPECT_EQ(r.match.unmatched_ground_truth, std::vector<int>{2});
}

TEST(EvalMetricsTest, IdenticalAndEmpty) {
  auto same = evaluate_regions(ThreeGt(), ThreeGt(), 0.0);
  EXPECT_EQ(same.scores.f_score, 1.0);
  EXPECT_EQ(same.mean_jaccard, 1.0);
  auto none = evaluate_regions({}, ThreeGt(), 1.0);
  EXPECT_EQ(none.scores.precision, 0.0);
  EXPECT_EQ(none.scores.recall, 0.0);
  EXPECT_EQ(none.fn, 3);
  std::vector<Region> bad{{{0, 0, 0}, {1}}};
  EXPECT_THROW(evaluate_regions(bad, ThreeGt(), 1.0), Error);
}

}  // namespace
}  // namespace colgen
