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

#include "colgen/io.hpp"

#include <gtest/gtest.h>

#include "colgen/gapstats.hpp"
#include "colgen/synthetic.hpp"

namespace colgen {
namespace {

std::string Fixture(const std::string& name) {
  return std::string(COLGEN_FIXTURE_DIR) + "/" + name;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kNumericalBreakdown;
}

TEST(IoTest, MinimalPose) {
  auto inst = std::get<PoseInstance>(parse_instance(Fixture("pose_minimal.json")));
  EXPECT_EQ(inst.num_keypoints, 1);
  EXPECT_EQ(inst.num_parts, 1);
  EXPECT_EQ(inst.theta[0], -1.0);
}

TEST(IoTest, AsymmetricPhiRejected) {
  EXPECT_EQ(CodeOf([] { parse_instance(Fixture("pose_asymmetric.json")); }),
            ErrorCode::kValidationError);
}

TEST(IoTest, MalformedInputs) {
  auto base = read_json_file(Fixture("pose_small.json"));
  auto j = base;
  j["extra"] = 1;
  EXPECT_EQ(CodeOf([&] { instance_from_json(j); }), ErrorCode::kParseError);
  j = base;
  j.erase("theta");
  EXPECT_EQ(CodeOf([&] { instance_from_json(j); }), ErrorCode::kParseError);
  j = base;
  j["theta"][0] = "x";
  EXPECT_EQ(CodeOf([&] { instance_from_json(j); }), ErrorCode::kParseError);
  j = base;
  j["part_of"][1] = 9;  // no such part
  EXPECT_EQ(CodeOf([&] { instance_from_json(j); }), ErrorCode::kValidationError);
  j = base;
  j["part_tree"] = Json::array({{0, 1}, {1, 2}, {0, 2}});  // cycle
  EXPECT_EQ(CodeOf([&] { instance_from_json(j); }), ErrorCode::kValidationError);
  j = base;
  j["problem"] = "other";
  EXPECT_EQ(CodeOf([&] { instance_from_json(j); }), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] { parse_instance(Fixture("missing.json")); }), ErrorCode::kParseError);
  auto cell = read_json_file(Fixture("counterexample.json"));
  cell["dist"][0][1] = 0.75;
  EXPECT_EQ(CodeOf([&] { instance_from_json(cell); }), ErrorCode::kValidationError);
}

TEST(IoTest, FixturesRoundTrip) {
  for (const char* name : {"counterexample.json", "pose_small.json", "pose_minimal.json"}) {
    auto first = read_json_file(Fixture(name));
    auto inst = instance_from_json(first);
    Json again = std::visit([](const auto& x) { return to_json(x); }, inst);
    auto inst2 = instance_from_json(again);
    Json third = std::visit([](const auto& x) { return to_json(x); }, inst2);
    EXPECT_EQ(again, third) << name;
  }
  auto p = std::get<PoseInstance>(parse_instance(Fixture("pose_small.json")));
  EXPECT_EQ(p.part_names[2], "shoulder");
  EXPECT_EQ(p.f(2, 1), -0.75);
  auto c = std::get<CellInstance>(parse_instance(Fixture("counterexample.json")));
  EXPECT_EQ(c.cost_offset, 7.0);
}

TEST(IoTest, SyntheticRoundTrip) {
  for (int seed = 0; seed < 20; ++seed) {
    auto p = random_pose_instance(PoseGenParams{}, seed);
    auto p2 = pose_from_json(Json::parse(to_json(p).dump()));
    EXPECT_EQ(p.phi, p2.phi);
    EXPECT_EQ(p.theta, p2.theta);
    EXPECT_EQ(p.part_tree, p2.part_tree);
    auto c = random_cell_instance(CellGenParams{}, seed);
    auto c2 = cell_from_json(Json::parse(to_json(c).dump()));
    EXPECT_EQ(c.dist, c2.dist);
    EXPECT_EQ(c.phi, c2.phi);
    EXPECT_EQ(c.area, c2.area);
  }
}

TEST(IoTest, ReportRoundTrip) {
  auto c = std::get<CellInstance>(parse_instance(Fixture("counterexample.json")));
  auto r = run_colgen(CellProblem(c), SolveConfig{});
  auto rep = make_report("cell", r);
  EXPECT_DOUBLE_EQ(rep.objective, -5.0);
  Json a = to_json(rep);
  Json b = to_json(report_from_json(Json::parse(a.dump())));
  EXPECT_EQ(a, b);
  a["bogus"] = true;
  EXPECT_EQ(CodeOf([&] { report_from_json(a); }), ErrorCode::kParseError);
}

TEST(IoTest, EvalFixture) {
  auto pred = regions_from_json(read_json_file(Fixture("eval_pred.json")));
  auto gt = regions_from_json(read_json_file(Fixture("eval_gt.json")));
  auto want = read_json_file(Fixture("eval_expected.json"));
  auto r = evaluate_regions(pred, gt, want["threshold"].get<double>());
  EXPECT_EQ(r.tp, want["tp"].get<long>());
  EXPECT_EQ(r.fp, want["fp"].get<long>());
  EXPECT_EQ(r.fn, want["fn"].get<long>());
  EXPECT_DOUBLE_EQ(r.scores.precision, want["precision"].get<double>());
  EXPECT_DOUBLE_EQ(r.scores.recall, want["recall"].get<double>());
  EXPECT_DOUBLE_EQ(r.scores.f_score, want["f_score"].get<double>());
  EXPECT_DOUBLE_EQ(r.mean_jaccard, want["mean_jaccard"].get<double>());
}

TEST(GapStatsTest, Buckets) {
  auto s = gap_stats({0.0, 1e-12, 0.05, 0.2, 0.005, 0.00005});
  EXPECT_DOUBLE_EQ(s.zero_fraction, 2.0 / 6);
  EXPECT_EQ(s.under, (std::vector<double>{5.0 / 6, 5.0 / 6, 4.0 / 6, 3.0 / 6, 3.0 / 6}));
  EXPECT_TRUE(gap_stats_monotone(s));
  EXPECT_EQ(gap_stats({}).count, 0);
  auto text = format_gap_stats(s, "pose");
  EXPECT_NE(text.find("pose zero_gap 0.3333"), std::string::npos);
  EXPECT_NE(text.find("pose gap_under 0.0001 0.5000"), std::string::npos);
}

}  // namespace
}  // namespace colgen
