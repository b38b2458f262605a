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

#include "colgen/pose.hpp"

#include <gtest/gtest.h>

#include <random>

#include "colgen/exact.hpp"
#include "colgen/synthetic.hpp"
#include "oracles.hpp"

namespace colgen {
namespace {

// Parts: 0 neck (global, root), 1 head, 2 shoulder. Tree 0-1, 0-2.
// Key-points: 0 neck; 1, 2 heads; 3 shoulder.
PoseInstance Small() {
  PoseInstance p = PoseInstance::make(4, 3);
  p.part_of = {0, 1, 1, 2};
  p.global_parts = {0};
  p.part_tree = {{0, 1}, {0, 2}};
  p.theta = {-1.0, -0.5, 0.25, -2.0};
  p.set_phi(0, 1, -1.0);
  p.set_phi(0, 2, 0.5);
  p.set_phi(0, 3, 1.0);
  p.set_phi(1, 2, -0.75);
  return p;
}

TEST(PoseTest, InstanceValidation) {
  auto p = Small();
  EXPECT_NO_THROW(p.validate());
  auto q = p;
  q.phi[1] = 7.0;  // asymmetric
  EXPECT_THROW(q.validate(), Error);
  q = p;
  q.set_phi(1, 3, 1.0);  // head and shoulder are not linked
  EXPECT_THROW(q.validate(), Error);
  q = p;
  q.global_parts.clear();
  EXPECT_THROW(q.validate(), Error);
  q = p;
  q.part_tree.pop_back();
  EXPECT_THROW(q.validate(), Error);
}

TEST(PoseTest, Costs) {
  auto p = Small();
  EXPECT_DOUBLE_EQ(global_pose_cost(p, {0, 1, 3}), -1.0 - 0.5 - 2.0 - 1.0 + 1.0);
  EXPECT_DOUBLE_EQ(global_pose_cost(p, {3, 0}, 2.0), -1.0 - 2.0 + 1.0 + 2.0);
  EXPECT_THROW(global_pose_cost(p, {1, 2}), Error);   // repeats a part
  EXPECT_THROW(global_pose_cost(p, {1, 3}), Error);   // no global part
  EXPECT_DOUBLE_EQ(local_pose_cost(p, {1, 2}, 1), 0.25 - 0.75);
  EXPECT_DOUBLE_EQ(local_pose_cost(p, {1}, 1), 0.0);
  EXPECT_THROW(local_pose_cost(p, {0, 1}, 0), Error);  // mixes parts
  EXPECT_THROW(local_pose_cost(p, {2}, 1), Error);     // anchor missing
}

TEST(PoseTest, PricingExample) {
  auto p = Small();
  auto du = PoseDuals::zeros(4);
  auto g = price_global(p, 0, du);
  // {0,1,3}: -3.5; {0,1}: -2.5; {0,3}: -2.
  EXPECT_EQ(g.column.elements, (std::vector<int>{0, 1, 3}));
  EXPECT_DOUBLE_EQ(g.reduced_cost, -3.5);
  du.lambda3[0] = 1.0;
  EXPECT_DOUBLE_EQ(price_global(p, 0, du).reduced_cost, -4.5);
  auto l = price_local(p, 1, du);
  EXPECT_EQ(l.column.elements, (std::vector<int>{1, 2}));
  EXPECT_DOUBLE_EQ(l.reduced_cost, -0.5);
  du.lambda1[2] = 1.0;
  l = price_local(p, 1, du);
  EXPECT_EQ(l.column.elements, (std::vector<int>{1}));
  EXPECT_DOUBLE_EQ(l.reduced_cost, 0.0);
}

TEST(PoseTest, GlobalPricingRejectsNonGlobalAnchor) {
  auto p = Small();
  EXPECT_THROW(price_global(p, 1, PoseDuals::zeros(4)), Error);
  auto du = PoseDuals::zeros(4);
  auto t = TripleRow::make(0, 1, 3, ColumnKind::kGlobalPose);
  t.dual = 1.0;
  du.triples.push_back(t);
  EXPECT_THROW(price_global(p, 0, du, GlobalMethod::kDynamicProgram), Error);
}

double ViewCost(const PoseProblem& p, const Column& q, const PoseDuals& du) {
  auto stacked = du.stacked();
  return reduced_cost(p, q, DualView{stacked, du.triples});
}

PoseGenParams TwoGlobal() {
  PoseGenParams g;
  g.num_parts = 5;
  g.num_global_parts = 2;
  return g;
}

TEST(PoseTest, GlobalPricingMatchesExhaustive) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 150; ++trial) {
    auto inst = trial % 2 ? random_pose_instance(PoseGenParams{}, trial)
                          : random_pose_instance(TwoGlobal(), trial);
    inst.cost_offset = trial % 3 == 0 ? 1.5 : 0.0;
    auto du = testing::RandomPoseDuals(rng, inst, trial % 4 == 0 ? 0 : 4);
    for (int a = 0; a < inst.num_keypoints; ++a) {
      if (!inst.is_global_keypoint(a)) continue;
      auto want = exhaustive_bqp(testing::GlobalPricingBqp(inst, a, du));
      auto bb = price_global(inst, a, du, GlobalMethod::kBranchAndBound);
      ASSERT_NEAR(bb.reduced_cost, want.value, 1e-9) << trial << " " << a;
      EXPECT_NEAR(ViewCost(PoseProblem(inst), bb.column, du),
                  bb.reduced_cost, 1e-9);
      bool dp_ok = inst.part_of[a] == inst.root_part;
      for (const auto& t : du.triples) {
        dp_ok = dp_ok && !(t.applies_to == ColumnKind::kGlobalPose && t.dual > 0);
      }
      if (dp_ok) {
        auto dp = price_global(inst, a, du, GlobalMethod::kDynamicProgram);
        ASSERT_NEAR(dp.reduced_cost, want.value, 1e-9) << trial << " " << a;
      }
    }
  }
}

TEST(PoseTest, LocalPricingMatchesExhaustive) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 150; ++trial) {
    auto inst = random_pose_instance(PoseGenParams{}, 500 + trial);
    auto du = testing::RandomPoseDuals(rng, inst, 6);
    PoseProblem problem(inst);
    for (int a = 0; a < inst.num_keypoints; ++a) {
      auto want = exhaustive_bqp(testing::LocalPricingBqp(inst, a, du));
      auto got = price_local(inst, a, du);
      ASSERT_NEAR(got.reduced_cost, want.value, 1e-9) << trial << " " << a;
      // Column cost plus dual incidences gives the same number.
      EXPECT_NEAR(ViewCost(problem, got.column, du),
                  got.reduced_cost, 1e-9);
    }
  }
}

TEST(PoseTest, TripleAllowed) {
  auto inst = random_pose_instance(TwoGlobal(), 3);
  PoseProblem p(inst);
  auto by = inst.keypoints_by_part();
  auto g = TripleRow::make(by[0][0], by[1][0], by[2][0], ColumnKind::kGlobalPose);
  EXPECT_TRUE(p.triple_allowed(g));
  auto l = TripleRow::make(by[0][0], by[1][0], by[2][0], ColumnKind::kLocalPose);
  EXPECT_FALSE(p.triple_allowed(l));
}

TEST(PoseTest, OmegaOneCoversEveryRemoval) {
  for (int seed = 0; seed < 40; ++seed) {
    auto inst = random_pose_instance(PoseGenParams{}, seed);
    auto ob = compute_omega_bounds(inst);
    auto u = enumerate_universe(inst);
    for (int d = 0; d < inst.num_keypoints; ++d) {
      if (inst.is_global_keypoint(d)) {
        EXPECT_TRUE(std::isinf(ob.omega1[d]));
        continue;
      }
      for (const auto& q : u.columns) {
        if (!q.contains(d)) continue;
        std::vector<int> bar;
        for (int e : q.elements) {
          if (e != d) bar.push_back(e);
        }
        if (q.kind == ColumnKind::kGlobalPose) {
          double extra = global_pose_cost(inst, bar) - q.cost;
          EXPECT_GE(ob.omega1[d], ob.epsilon + extra + ob.anchored_gain[d] - 1e-9);
        } else if (q.anchor == d) {
          EXPECT_GE(ob.anchored_gain[d], -q.cost - 1e-9);
        } else {
          double extra = std::min(0.0, local_pose_cost(inst, bar, q.anchor)) - q.cost;
          EXPECT_GE(ob.omega1[d], ob.epsilon + extra - 1e-9);
        }
      }
    }
  }
}

TEST(PoseTest, OmegaFourCoversEveryRemoval) {
  std::mt19937_64 rng(4);
  int finite = 0;
  for (int seed = 0; seed < 40; ++seed) {
    auto inst = random_pose_instance(PoseGenParams{}, 100 + seed);
    auto ob = compute_omega_bounds(inst);
    auto u = enumerate_universe(inst);
    auto by = inst.keypoints_by_part();
    if (inst.num_parts < 3) continue;
    for (int rep = 0; rep < 10; ++rep) {
      std::array<int, 3> c;
      for (int k = 0; k < 3; ++k) {
        const auto& kp = by[k + (inst.num_parts > 3 && rep % 2)];
        c[k] = kp[rng() % kp.size()];
      }
      std::sort(c.begin(), c.end());
      double w = omega4_bound(inst, ob, c);
      if (std::isinf(w)) continue;
      ++finite;
      // Best choice of the kept member, by brute force over covering poses.
      double want = OmegaBounds::kInf;
      for (int i = 0; i < 3; ++i) {
        int d1 = c[i], d2 = c[(i + 1) % 3], d3 = c[(i + 2) % 3];
        bool ok = true;
        double alpha = 0.0;
        for (const auto& q : u.columns) {
          if (q.kind != ColumnKind::kGlobalPose) continue;
          if (count_members(q.elements, c) < 2) continue;
          std::vector<int> bar;
          for (int e : q.elements) {
            if (e != d2 && e != d3) bar.push_back(e);
          }
          bool has_global = false;
          for (int e : bar) has_global = has_global || inst.is_global_keypoint(e);
          if (!has_global) {
            ok = false;
            break;
          }
          alpha = std::max(alpha, global_pose_cost(inst, bar) - q.cost);
        }
        (void)d1;
        if (ok) {
          want = std::min(want, ob.epsilon + alpha + ob.anchored_gain[d2] + ob.anchored_gain[d3]);
        }
      }
      EXPECT_GE(w, want - 1e-9) << seed;
    }
  }
  EXPECT_GT(finite, 50);
}

TEST(PoseTest, ColgenMatchesBruteForce) {
  for (int seed = 0; seed < 40; ++seed) {
    PoseGenParams g;
    g.num_parts = 2 + seed % 3;
    auto inst = random_pose_instance(g, seed);
    PoseProblem p(inst);
    auto r = run_colgen(p, SolveConfig{});
    auto bf = brute_force_setpack(p, enumerate_universe(inst));
    ASSERT_TRUE(r.bounds.converged) << seed;
    EXPECT_NEAR(r.bounds.upper, bf.value, 1e-6) << seed;
    EXPECT_LE(r.bounds.lower, bf.value + 1e-6) << seed;
  }
}

TEST(PoseTest, OmegaBoundsDoNotChangeOptimum) {
  for (int seed = 0; seed < 20; ++seed) {
    auto inst = random_pose_instance(PoseGenParams{}, 300 + seed);
    SolveConfig off;
    auto a = run_colgen(PoseProblem(inst), off);
    SolveConfig on;
    on.use_omega_bounds = true;
    auto b = run_colgen(PoseProblem(inst, true), on);
    ASSERT_TRUE(a.bounds.converged && b.bounds.converged);
    EXPECT_NEAR(a.bounds.upper, b.bounds.upper, 1e-6) << seed;
    EXPECT_FALSE(b.state.slack_primal.empty());
    for (double s : b.state.slack_primal) EXPECT_NEAR(s, 0.0, 1e-9) << seed;
  }
}

TEST(PoseTest, PlantedPeopleRecovered) {
  auto inst = planted_pose_instance(3, 4, 9);
  PoseProblem p(inst);
  auto r = run_colgen(p, SolveConfig{});
  ASSERT_TRUE(r.bounds.converged);
  int globals = 0;
  for (int j : r.bounds.upper_solution) {
    if (r.state.pool[j].kind == ColumnKind::kGlobalPose) {
      ++globals;
      EXPECT_EQ(r.state.pool[j].elements.size(), 4u);
    }
  }
  EXPECT_EQ(globals, 3);
}

TEST(PoseTest, GeneratorIsDeterministic) {
  auto a = random_pose_instance(PoseGenParams{}, 8), b = random_pose_instance(PoseGenParams{}, 8);
  EXPECT_EQ(a.part_of, b.part_of);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(a.part_tree, b.part_tree);
  EXPECT_NO_THROW(a.validate());
}

}  // namespace
}  // namespace colgen
