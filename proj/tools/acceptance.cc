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

// Acceptance runner: one PASS/FAIL line per criterion, exit 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "colgen/colgen.hpp"
#include "oracles.hpp"
#include "runner.hpp"

namespace colgen::acceptance {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int failures = 0;

void Report(const char* id, bool ok, const std::string& detail) {
  std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- AC1

void GoldenCounterexample() {
  auto t0 = Clock::now();
  std::vector<Column> u{make_cell_column({0, 1}, -4), make_cell_column({0, 2}, -4),
                        make_cell_column({1, 2}, -4), make_cell_column({0, 1, 2}, -5)};
  FiniteUniverseProblem p(3, u);
  double lp = solve(build_master(p, u, {}, false)).objective;
  std::vector<TripleRow> rows{TripleRow::make(0, 1, 2, ColumnKind::kCell)};
  double lp_tri = solve(build_master(p, u, rows, false)).objective;
  double ilp = solve_pool_ilp(p, u, rows, {}, 1000000).objective;
  double ilp_plain = solve_pool_ilp(p, u, {}, {}, 1000000).objective;
  auto run = run_colgen(p, SolveConfig{});
  double secs = Seconds(t0);
  bool ok = std::abs(lp + 6) <= 1e-6 && std::abs(lp_tri + 5) <= 1e-6 &&
            std::abs(ilp + 5) <= 1e-6 && std::abs(ilp_plain + 5) <= 1e-6 &&
            std::abs(run.bounds.upper + 5) <= 1e-6 && std::abs(run.bounds.lower + 5) <= 1e-6 &&
            secs < 0.1;
  Report("AC1", ok,
         Fmt("golden counterexample: LP %.9g, LP+triple %.9g, pool ILP %.9g, colgen [%.9g, %.9g], "
             "%.4f s (limit 0.1 s)",
             lp, lp_tri, ilp, run.bounds.lower, run.bounds.upper, secs));
}

// ------------------------------------------------------- suites 2 and 3

struct LpCheck {
  long solves = 0;
  long bad = 0;
  double worst_gap = 0.0, worst_comp = 0.0, worst_resid = 0.0, worst_rc = 0.0;

  void Add(const TraceRecord& t) {
    ++solves;
    const double scale = 1.0 + std::abs(t.lp_objective);
    worst_gap = std::max(worst_gap, t.lp_duality_gap / scale);
    worst_comp = std::max(worst_comp, t.lp_complementarity);
    worst_resid = std::max(worst_resid, t.lp_primal_residual);
    worst_rc = std::min(worst_rc, t.lp_min_reduced_cost);
    bad += t.lp_duality_gap > 1e-6 * scale || t.lp_complementarity > 1e-6 ||
           t.lp_primal_residual > 1e-6 || t.lp_min_reduced_cost < -1e-6;
  }
};

struct BoundCheck {
  long iterations = 0;
  long violations = 0;
  long final_mismatch = 0;
  double worst_final = 0.0;
};

struct CutCheck {
  long rows = 0;
  long violations = 0;
  long instances = 0;
};

struct SuiteResult {
  int instances = 0;
  int mismatches = 0;
  int not_converged = 0;
  double worst_diff = 0.0;
  double seconds = 0.0;
};

// Largest number of selected columns that can contain two or more members of
// the row, over every feasible 0/1 selection of the universe.
int MaxRowActivity(const PricingProblem& p, const ColumnUniverse& u, const TripleRow& t) {
  LinearProgram lp = build_master(p, u.columns, {}, false);
  bool any = false;
  for (std::size_t j = 0; j < u.columns.size(); ++j) {
    bool hit = triple_covers(t, u.columns[j]);
    lp.costs[j] = hit ? -1.0 : 0.0;
    any = any || hit;
  }
  if (!any) return 0;
  return static_cast<int>(std::lround(-brute_force_setpack(lp).value));
}

template <typename MakeProblem, typename MakeInstance>
SuiteResult RunSuite(int count, std::uint64_t seed0, MakeInstance make_instance,
                     MakeProblem make_problem, LpCheck& lpc, BoundCheck& bc, CutCheck& cc) {
  SuiteResult s;
  auto t0 = Clock::now();
  for (int i = 0; i < count; ++i) {
    auto inst = make_instance(seed0 + i);
    auto problem = make_problem(inst);
    auto universe = enumerate_universe(inst);
    const double opt = brute_force_setpack(*problem, universe).value;
    auto r = run_colgen(*problem, SolveConfig{});
    ++s.instances;
    s.not_converged += !r.bounds.converged;
    double diff = std::abs(r.bounds.upper - opt);
    s.worst_diff = std::max(s.worst_diff, diff);
    s.mismatches += diff > 1e-6;
    for (const auto& t : r.trace) {
      lpc.Add(t);
      ++bc.iterations;
      bc.violations += t.lower > opt + 1e-6 || t.upper < opt - 1e-6;
    }
    bc.violations += r.bounds.lower > opt + 1e-6 || r.bounds.upper < opt - 1e-6;
    double fin = std::abs(r.bounds.lower - r.state.lp_objective);
    bc.worst_final = std::max(bc.worst_final, fin);
    bc.final_mismatch += r.bounds.converged && fin > 1e-6;
    if (!r.state.triples.empty()) ++cc.instances;
    for (const auto& t : r.state.triples) {
      ++cc.rows;
      cc.violations += MaxRowActivity(*problem, universe, t) > 1;
    }
  }
  s.seconds = Seconds(t0);
  return s;
}

// --------------------------------------------------------------- AC4

struct ProbeStats {
  long probes = 0;
  long mismatches = 0;
  double worst = 0.0;
  void Add(double got, double want) {
    ++probes;
    double d = std::abs(got - want);
    worst = std::max(worst, d);
    mismatches += d > 1e-9;
  }
};

void PricingExactness() {
  std::mt19937_64 rng(20260);
  ProbeStats local, global_dp, global_bb, cell;
  for (int trial = 0; local.probes < 1000 || global_bb.probes < 1000 || global_dp.probes < 1000;
       ++trial) {
    PoseGenParams g;
    g.num_parts = 2 + trial % 4;
    g.num_global_parts = 1 + trial % 2;
    auto inst = random_pose_instance(g, 7000 + trial);
    inst.cost_offset = trial % 3 == 0 ? 2.5 : 0.0;
    auto du = testing::RandomPoseDuals(rng, inst, 1 + trial % 5);
    auto no_global = du;
    std::erase_if(no_global.triples,
                  [](const TripleRow& t) { return t.applies_to == ColumnKind::kGlobalPose; });
    std::uniform_int_distribution<int> pick(0, inst.num_keypoints - 1);
    int a = pick(rng);
    if (local.probes < 1000) {
      local.Add(price_local(inst, a, du).reduced_cost,
                exhaustive_bqp(testing::LocalPricingBqp(inst, a, du)).value);
    }
    for (int d = 0; d < inst.num_keypoints; ++d) {
      if (!inst.is_global_keypoint(d)) continue;
      if (global_bb.probes < 1000) {
        global_bb.Add(price_global(inst, d, du, GlobalMethod::kBranchAndBound).reduced_cost,
                      exhaustive_bqp(testing::GlobalPricingBqp(inst, d, du)).value);
      }
      if (inst.part_of[d] == inst.root_part && global_dp.probes < 1000) {
        global_dp.Add(
            price_global(inst, d, no_global, GlobalMethod::kDynamicProgram).reduced_cost,
            exhaustive_bqp(testing::GlobalPricingBqp(inst, d, no_global)).value);
      }
    }
  }
  for (int trial = 0; cell.probes < 1000; ++trial) {
    CellGenParams g;
    g.num_superpixels = 3 + trial % 14;
    g.side = 2.0 + trial % 3;
    auto inst = random_cell_instance(g, 9000 + trial);
    inst.cost_offset = trial % 4 == 0 ? 1.25 : 0.0;
    auto lambda = testing::RandomDuals(rng, inst.num_superpixels, 3.0, 0.3);
    std::vector<TripleRow> rows;
    std::uniform_int_distribution<int> pick(0, inst.num_superpixels - 1);
    for (int k = 0; k < 3; ++k) {
      int x = pick(rng), y = pick(rng), z = pick(rng);
      if (x == y || y == z || x == z) continue;
      auto t = TripleRow::make(x, y, z, ColumnKind::kCell);
      t.dual = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
      rows.push_back(t);
    }
    int c = pick(rng);
    if (candidate_set(inst, c).size() > static_cast<std::size_t>(kBqpMaxFree)) continue;
    cell.Add(price_cell(inst, c, lambda, rows).reduced_cost,
             exhaustive_bqp(testing::CellPricingBqp(inst, c, lambda, rows)).value);
  }
  bool ok = local.mismatches + global_dp.mismatches + global_bb.mismatches + cell.mismatches == 0;
  Report("AC4", ok,
         Fmt("pricing vs exhaustive BQP (tol 1e-9): local %ld/%ld, global DP %ld/%ld, "
             "global B&B %ld/%ld, cell %ld/%ld mismatches; worst |diff| %.2e",
             local.mismatches, local.probes, global_dp.mismatches, global_dp.probes,
             global_bb.mismatches, global_bb.probes, cell.mismatches, cell.probes,
             std::max({local.worst, global_dp.worst, global_bb.worst, cell.worst})));
}

// --------------------------------------------------------------- AC6

void OmegaSoundness() {
  int mismatches = 0, nonzero_slack = 0, not_converged = 0;
  long slacks = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto inst = tools::suite_pose_instance(i);
    auto off = run_colgen(PoseProblem(inst), SolveConfig{});
    SolveConfig cfg;
    cfg.use_omega_bounds = true;
    auto on = run_colgen(PoseProblem(inst, true), cfg);
    not_converged += !off.bounds.converged || !on.bounds.converged;
    double d = std::max(std::abs(off.bounds.upper - on.bounds.upper),
                        std::abs(off.state.lp_objective - on.state.lp_objective));
    worst = std::max(worst, d);
    mismatches += d > 1e-6;
    for (double s : on.state.slack_primal) {
      ++slacks;
      nonzero_slack += std::abs(s) > 1e-9;
    }
  }
  Report("AC6", mismatches == 0 && nonzero_slack == 0 && not_converged == 0 && slacks > 0,
         Fmt("omega bounds on vs off, 50 pose instances: %d objective mismatches (worst %.2e, "
             "tol 1e-6), %d/%ld slack values nonzero at termination, %d not converged",
             mismatches, worst, nonzero_slack, slacks, not_converged));
}

// --------------------------------------------------------------- AC8

void GapHarness() {
  auto t0 = Clock::now();
  tools::BatchParams bp;
  auto text = tools::format_batch(tools::run_gap_batch(bp, SolveConfig{}));
  std::istringstream in(text);
  std::string line;
  const std::regex count_re(R"((pose|cell|all) instances (\d+))");
  const std::regex zero_re(R"((pose|cell|all) zero_gap ([01]\.\d{4}))");
  const std::regex under_re(R"((pose|cell|all) gap_under ([0-9.e-]+) ([01]\.\d{4}))");
  const std::vector<std::string> buckets{"0.16", "0.1", "0.01", "0.001", "0.0001"};
  bool format_ok = true, monotone = true;
  int total = -1;
  double all_zero = 0.0;
  std::vector<double> all_under;
  for (const char* label : {"pose", "cell", "all"}) {
    std::smatch m;
    std::getline(in, line);
    format_ok = format_ok && std::regex_match(line, m, count_re) && m[1] == label;
    if (std::string(label) == "all" && format_ok) total = std::stoi(m[2]);
    std::getline(in, line);
    format_ok = format_ok && std::regex_match(line, m, zero_re) && m[1] == label;
    double zero = format_ok ? std::stod(m[2]) : 0.0;
    double prev = 1.0;
    std::vector<double> under;
    for (const auto& b : buckets) {
      std::getline(in, line);
      format_ok = format_ok && std::regex_match(line, m, under_re) && m[1] == label && m[2] == b;
      if (!format_ok) break;
      double f = std::stod(m[3]);
      monotone = monotone && f <= prev && f >= zero;
      prev = f;
      under.push_back(f);
    }
    if (std::string(label) == "all") {
      all_zero = zero;
      all_under = under;
    }
  }
  std::string frac;
  for (double f : all_under) frac += Fmt(" %.4f", f);
  Report("AC8", format_ok && monotone && total == 400,
         Fmt("gap statistics over %d synthetic instances: zero_gap %.4f, under "
             "{0.16,0.1,0.01,0.001,0.0001}:%s; format %s, cumulative fractions %s; %.1f s",
             total, all_zero, frac.c_str(), format_ok ? "ok" : "BAD",
             monotone ? "monotone" : "NOT monotone", Seconds(t0)));
}

// --------------------------------------------------------------- AC9

double PermutationOptimum(const std::vector<std::vector<double>>& c) {
  const int r = static_cast<int>(c.size()), k = static_cast<int>(c[0].size());
  const bool flip = r > k;
  std::vector<int> perm(std::max(r, k));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double s = 0.0;
    for (int i = 0; i < std::min(r, k); ++i) s += flip ? c[perm[i]][i] : c[i][perm[i]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void HungarianAndMetrics() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  int mismatches = 0, beaten = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    int r = dim(rng), k = dim(rng);
    std::vector<std::vector<double>> c(r, std::vector<double>(k));
    for (auto& row : c) {
      for (auto& x : row) x = val(rng);
    }
    double got = hungarian(c).cost;
    double d = std::abs(got - PermutationOptimum(c));
    worst = std::max(worst, d);
    mismatches += d > 1e-9;
    // Random injective maps never beat it.
    std::vector<int> perm(std::max(r, k));
    std::iota(perm.begin(), perm.end(), 0);
    for (int s = 0; s < 1000; ++s) {
      std::shuffle(perm.begin(), perm.end(), rng);
      double v = 0.0;
      for (int i = 0; i < std::min(r, k); ++i) v += r > k ? c[perm[i]][i] : c[i][perm[i]];
      beaten += v < got - 1e-9;
    }
  }
  // Hand-computed values.
  int fixture_bad = 0;
  auto a = prf(10, 0, 0), b = prf(0, 5, 5), c = prf(3, 1, 2);
  fixture_bad += !(a.precision == 1.0 && a.recall == 1.0 && a.f_score == 1.0);
  fixture_bad += !(b.precision == 0.0 && b.recall == 0.0 && b.f_score == 0.0);
  fixture_bad += !(c.precision == 0.75 && c.recall == 0.6 && c.f_score == 2 * 0.75 * 0.6 / 1.35);
  fixture_bad += jaccard({1, 2, 3}, {2, 3, 4}) != 0.5;
  fixture_bad += jaccard({1, 2}, {1, 2}) != 1.0;
  fixture_bad += jaccard({1}, {2}) != 0.0;
  fixture_bad += jaccard({}, {}) != 0.0;
  const std::string dir = COLGEN_FIXTURE_DIR;
  auto want = read_json_file(dir + "/eval_expected.json");
  auto r = evaluate_regions(regions_from_json(read_json_file(dir + "/eval_pred.json")),
                            regions_from_json(read_json_file(dir + "/eval_gt.json")),
                            want["threshold"].get<double>());
  fixture_bad += r.tp != want["tp"].get<long>() || r.fp != want["fp"].get<long>() ||
                 r.fn != want["fn"].get<long>();
  fixture_bad += r.scores.precision != want["precision"].get<double>();
  fixture_bad += r.scores.recall != want["recall"].get<double>();
  fixture_bad += r.scores.f_score != want["f_score"].get<double>();
  fixture_bad += r.mean_jaccard != want["mean_jaccard"].get<double>();
  Report("AC9", mismatches == 0 && beaten == 0 && fixture_bad == 0,
         Fmt("hungarian vs permutation brute force, 500 matrices n<=6: %d mismatches (worst "
             "%.2e); %d random permutations cheaper; prf/jaccard fixtures: %d wrong",
             mismatches, worst, beaten, fixture_bad));
}

int Main() {
  GoldenCounterexample();

  LpCheck lpc;
  BoundCheck bc;
  CutCheck cc;
  auto pose = RunSuite(
      200, 0, [](std::uint64_t s) { return tools::suite_pose_instance(s); },
      [](const PoseInstance& i) { return std::make_unique<PoseProblem>(i); }, lpc, bc, cc);
  Report("AC2", pose.mismatches == 0 && pose.not_converged == 0 && pose.seconds < 60.0,
         Fmt("pose suite: %d instances, %d upper != brute force (worst %.2e, tol 1e-6), "
             "%d not converged, %.2f s (limit 60 s)",
             pose.instances, pose.mismatches, pose.worst_diff, pose.not_converged,
             pose.seconds));
  auto cell = RunSuite(
      200, 0, [](std::uint64_t s) { return tools::suite_cell_instance(s); },
      [](const CellInstance& i) { return std::make_unique<CellProblem>(i); }, lpc, bc, cc);
  Report("AC3", cell.mismatches == 0 && cell.not_converged == 0 && cell.seconds < 60.0,
         Fmt("cell suite: %d instances, %d upper != brute force (worst %.2e, tol 1e-6), "
             "%d not converged, %.2f s (limit 60 s)",
             cell.instances, cell.mismatches, cell.worst_diff, cell.not_converged,
             cell.seconds));

  PricingExactness();

  Report("AC5", bc.violations == 0 && bc.final_mismatch == 0,
         Fmt("anytime bounds over %ld iterations of suites 2-3: %ld with lower > opt or "
             "upper < opt; %ld runs with |lower - lp| > 1e-6 at convergence (worst %.2e)",
             bc.iterations, bc.violations, bc.final_mismatch, bc.worst_final));

  OmegaSoundness();

  Report("AC7", cc.violations == 0,
         Fmt("cut validity: %ld triple rows from %ld runs replayed against every feasible "
             "selection of the universe, %ld violated",
             cc.rows, cc.instances, cc.violations));

  GapHarness();
  HungarianAndMetrics();

  Report("AC10", lpc.bad == 0,
         Fmt("master LP checks over %ld solves: %ld failing; worst relative duality gap %.2e, "
             "complementarity %.2e, primal residual %.2e, min reduced cost %.2e (tol 1e-6)",
             lpc.solves, lpc.bad, lpc.worst_gap, lpc.worst_comp, lpc.worst_resid,
             lpc.worst_rc));

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace colgen::acceptance

int main() {
  try {
    return colgen::acceptance::Main();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
}
