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

// colgen: solve, gen, eval, gapstats. Exit codes: 0 converged / ok,
// 1 error, 2 iteration limit.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "colgen/colgen.hpp"
#include "runner.hpp"

namespace colgen::tools {
namespace {

const std::map<std::string, bool> kOnOff{{"on", true}, {"off", false}};

struct SolveArgs {
  std::string instance;
  std::string problem;
  bool triples = true;
  bool omega = false;
  bool close_gap = true;
  std::optional<double> offset;
  double tol = 1e-6;
  int max_iters = 1000;
  std::uint64_t seed = 0;
  std::string trace;
  std::string output;
  bool oracle_check = false;
  int jobs = 1;
};

void emit(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(path, j);
  }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write " + path);
  out << "iteration,lp_objective,lower,upper,columns_added,rows_added,wall_time\n";
  out.precision(17);
  for (const auto& t : trace) {
    out << t.iteration << ',' << t.lp_objective << ',' << t.lower << ',' << t.upper << ','
        << t.columns_added << ',' << t.rows_added << ',' << t.wall_time << '\n';
  }
}

int run_solve(const SolveArgs& a) {
  Instance inst = parse_instance(a.instance);
  const std::string kind = problem_name(inst);
  if (!a.problem.empty() && a.problem != kind) {
    throw Error(ErrorCode::kValidationError,
                "--problem " + a.problem + " but the file holds a " + kind + " instance");
  }
  SolveConfig cfg;
  cfg.use_triples = a.triples;
  cfg.use_omega_bounds = a.omega;
  cfg.column_violation_tol = a.tol;
  cfg.max_iterations = a.max_iters;
  cfg.rng_seed = a.seed;
  cfg.jobs = a.jobs;
  cfg.close_gap = a.close_gap;
  if (a.offset) cfg.cost_offset = *a.offset;
  ColgenResult r = solve_instance(inst, cfg, a.offset);
  SolveReport rep = make_report(kind, r);
  emit(to_json(rep), a.output);
  if (!a.trace.empty()) write_trace_csv(a.trace, r.trace);
  if (a.oracle_check) {
    Instance checked = inst;
    if (a.offset) {
      std::visit([&](auto& x) { x.cost_offset = *a.offset; }, checked);
    }
    auto best = oracle_optimum(checked);
    if (!best) {
      std::cerr << "oracle-check: skipped (instance above enumeration limits)\n";
    } else if (std::abs(*best - rep.upper) > 1e-6) {
      std::cerr << "oracle-check: MISMATCH exact " << *best << " vs upper " << rep.upper << "\n";
      return 1;
    } else {
      std::cerr << "oracle-check: ok (exact " << *best << ")\n";
    }
  }
  return r.bounds.iteration_limit ? 2 : 0;
}

struct GenArgs {
  std::string kind = "pose";
  bool planted = false;
  int count = 2;  // people or cells when planted
  int parts = 4;
  int size = 3;  // key-points per part max, or super-pixels per planted cell
  int superpixels = 8;
  std::uint64_t seed = 0;
  std::string output;
};

int run_gen(const GenArgs& a) {
  Json j;
  if (a.kind == "pose") {
    if (a.planted) {
      j = to_json(planted_pose_instance(a.count, a.parts, a.seed));
    } else {
      PoseGenParams g;
      g.num_parts = a.parts;
      g.max_keypoints_per_part = a.size;
      j = to_json(random_pose_instance(g, a.seed));
    }
  } else if (a.planted) {
    j = to_json(planted_cell_instance(a.count, a.size, a.seed));
  } else {
    CellGenParams g;
    g.num_superpixels = a.superpixels;
    // Keep the density of the default 8-point field.
    g.side = 4.0 * std::sqrt(a.superpixels / 8.0);
    j = to_json(random_cell_instance(g, a.seed));
  }
  emit(j, a.output);
  return 0;
}

int run_eval(const std::string& pred_path, const std::string& gt_path, double threshold,
             const std::string& output) {
  auto pred = regions_from_json(read_json_file(pred_path));
  auto gt = regions_from_json(read_json_file(gt_path));
  auto r = evaluate_regions(pred, gt, threshold);
  Json pairs = Json::array();
  for (auto [p, g] : r.match.pairs) pairs.push_back({p, g});
  Json j{{"threshold", threshold},
         {"tp", r.tp},
         {"fp", r.fp},
         {"fn", r.fn},
         {"precision", r.scores.precision},
         {"recall", r.scores.recall},
         {"f_score", r.scores.f_score},
         {"mean_jaccard", r.mean_jaccard},
         {"pairs", pairs},
         {"unmatched_predictions", r.match.unmatched_predictions},
         {"unmatched_ground_truth", r.match.unmatched_ground_truth}};
  emit(j, output);
  return 0;
}

int run_gapstats(const BatchParams& bp, bool triples, bool omega, bool close_gap) {
  SolveConfig cfg;
  cfg.use_triples = triples;
  cfg.use_omega_bounds = omega;
  cfg.close_gap = close_gap;
  std::cout << format_batch(run_gap_batch(bp, cfg));
  return 0;
}

int main_impl(int argc, char** argv) {
  CLI::App app{"Column generation for pose and cell segmentation"};
  app.require_subcommand(1);

  SolveArgs s;
  auto* solve = app.add_subcommand("solve", "Solve an instance file, print a JSON report");
  solve->add_option("instance", s.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--problem", s.problem, "Expected problem kind")
      ->check(CLI::IsMember({"pose", "cell"}));
  solve->add_option("--triples", s.triples, "Triple rows on/off")
      ->transform(CLI::CheckedTransformer(kOnOff));
  solve->add_option("--omega-bounds", s.omega, "Dual-bound slacks on/off (pose)")
      ->transform(CLI::CheckedTransformer(kOnOff));
  solve->add_option("--close-gap", s.close_gap, "Certify the upper bound on/off")
      ->transform(CLI::CheckedTransformer(kOnOff));
  solve->add_option("--offset", s.offset, "Cost offset for global poses and cells");
  solve->add_option("--tol", s.tol, "Column violation tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", s.max_iters, "Iteration limit")->check(CLI::PositiveNumber);
  solve->add_option("--seed", s.seed, "Random seed");
  solve->add_option("--trace", s.trace, "Write per-iteration CSV here");
  solve->add_option("-o,--output", s.output, "Report path (default stdout)");
  solve->add_flag("--oracle-check", s.oracle_check, "Compare with exhaustive search");
  solve->add_option("--jobs", s.jobs, "Pricing threads")->check(CLI::PositiveNumber);

  GenArgs g;
  auto* gen = app.add_subcommand("gen", "Write a synthetic instance");
  gen->add_option("--kind", g.kind, "pose or cell")->check(CLI::IsMember({"pose", "cell"}));
  gen->add_flag("--planted", g.planted, "Planted ground truth");
  gen->add_option("--count", g.count, "People or cells when planted")->check(CLI::PositiveNumber);
  gen->add_option("--parts", g.parts, "Number of parts")->check(CLI::PositiveNumber);
  gen->add_option("--size", g.size, "Max key-points per part, or super-pixels per planted cell")
      ->check(CLI::PositiveNumber);
  gen->add_option("--superpixels", g.superpixels, "Super-pixels (random cell)")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", g.seed, "Random seed");
  gen->add_option("-o,--output", g.output, "Output path (default stdout)");

  std::string pred, gt, eval_out;
  double threshold = 1.0;
  auto* eval = app.add_subcommand("eval", "Score predicted regions against ground truth");
  eval->add_option("--pred", pred, "Predicted regions JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", gt, "Ground-truth regions JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--threshold", threshold, "Max centroid distance for a match");
  eval->add_option("-o,--output", eval_out, "Output path (default stdout)");

  BatchParams bp;
  bool gap_triples = true, gap_omega = false, gap_close = true;
  auto* gaps = app.add_subcommand("gapstats", "Normalized-gap fractions over synthetic runs");
  gaps->add_option("--per-kind", bp.per_kind, "Instances per problem kind")
      ->check(CLI::PositiveNumber);
  gaps->add_option("--seed", bp.seed, "First seed");
  gaps->add_option("--pose-parts", bp.pose_parts, "Parts per pose instance")
      ->check(CLI::PositiveNumber);
  gaps->add_option("--pose-part-size", bp.pose_max_part_size, "Max key-points per part")
      ->check(CLI::PositiveNumber);
  gaps->add_option("--cell-superpixels", bp.cell_superpixels, "Super-pixels per cell instance")
      ->check(CLI::PositiveNumber);
  gaps->add_option("--triples", gap_triples, "Triple rows on/off")
      ->transform(CLI::CheckedTransformer(kOnOff));
  gaps->add_option("--omega-bounds", gap_omega, "Dual-bound slacks on/off (pose)")
      ->transform(CLI::CheckedTransformer(kOnOff));
  gaps->add_option("--close-gap", gap_close, "Certify the upper bound on/off")
      ->transform(CLI::CheckedTransformer(kOnOff));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return run_solve(s);
    if (*gen) return run_gen(g);
    if (*eval) return run_eval(pred, gt, threshold, eval_out);
    if (*gaps) return run_gapstats(bp, gap_triples, gap_omega, gap_close);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace colgen::tools

int main(int argc, char** argv) { return colgen::tools::main_impl(argc, argv); }
