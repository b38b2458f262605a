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

// Glue shared by the command-line tool and the acceptance runner.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "colgen/colgen.hpp"

namespace colgen::tools {

inline std::string problem_name(const Instance& inst) {
  return std::holds_alternative<PoseInstance>(inst) ? "pose" : "cell";
}

// cost_offset from the config replaces the instance's when given.
inline ColgenResult solve_instance(Instance inst, const SolveConfig& cfg,
                                   std::optional<double> offset = std::nullopt) {
  if (auto* p = std::get_if<PoseInstance>(&inst)) {
    if (offset) p->cost_offset = *offset;
    return run_colgen(PoseProblem(std::move(*p), cfg.use_omega_bounds), cfg);
  }
  auto& c = std::get<CellInstance>(inst);
  if (offset) c.cost_offset = *offset;
  if (cfg.use_omega_bounds) {
    throw Error(ErrorCode::kValidationError, "omega bounds apply to pose problems only");
  }
  return run_colgen(CellProblem(std::move(c)), cfg);
}

// Exact optimum over the enumerated universe, or nullopt when too large.
inline std::optional<double> oracle_optimum(const Instance& inst) {
  try {
    if (auto* p = std::get_if<PoseInstance>(&inst)) {
      return brute_force_setpack(PoseProblem(*p), enumerate_universe(*p)).value;
    }
    const auto& c = std::get<CellInstance>(inst);
    return brute_force_setpack(CellProblem(c), enumerate_universe(c)).value;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInstanceTooLarge) return std::nullopt;
    throw;
  }
}

// Instance families used for the batch statistics and the oracle suites.
inline PoseInstance suite_pose_instance(std::uint64_t seed) {
  PoseGenParams g;
  g.num_parts = 2 + static_cast<int>(seed % 3);
  g.num_global_parts = 1;
  g.max_keypoints_per_part = 3;
  return random_pose_instance(g, seed);
}

inline CellInstance suite_cell_instance(std::uint64_t seed) {
  CellGenParams g;
  g.num_superpixels = 5 + static_cast<int>(seed % 6);
  return random_cell_instance(g, seed);
}

struct BatchStats {
  GapStats pose, cell, all;
};

// Larger than the oracle suites; only bounds are compared here.
struct BatchParams {
  int per_kind = 200;
  std::uint64_t seed = 0;
  int pose_parts = 6;
  int pose_max_part_size = 4;
  int cell_superpixels = 14;
};

// Runs per_kind pose and per_kind cell instances and summarizes gaps.
inline BatchStats run_gap_batch(const BatchParams& bp, const SolveConfig& cfg) {
  std::vector<double> pose_gaps, cell_gaps;
  PoseGenParams pg;
  pg.num_parts = bp.pose_parts;
  pg.max_keypoints_per_part = bp.pose_max_part_size;
  CellGenParams cg;
  cg.num_superpixels = bp.cell_superpixels;
  cg.side = 4.0 * std::sqrt(bp.cell_superpixels / 8.0);
  for (int i = 0; i < bp.per_kind; ++i) {
    auto inst = random_pose_instance(pg, bp.seed + i);
    auto r = run_colgen(PoseProblem(inst, cfg.use_omega_bounds), cfg);
    pose_gaps.push_back(r.bounds.normalized_gap);
  }
  SolveConfig cell_cfg = cfg;
  cell_cfg.use_omega_bounds = false;
  for (int i = 0; i < bp.per_kind; ++i) {
    auto r = run_colgen(CellProblem(random_cell_instance(cg, bp.seed + i)), cell_cfg);
    cell_gaps.push_back(r.bounds.normalized_gap);
  }
  BatchStats out;
  out.pose = gap_stats(pose_gaps);
  out.cell = gap_stats(cell_gaps);
  std::vector<double> all = pose_gaps;
  all.insert(all.end(), cell_gaps.begin(), cell_gaps.end());
  out.all = gap_stats(all);
  return out;
}

inline std::string format_batch(const BatchStats& s) {
  return format_gap_stats(s.pose, "pose") + format_gap_stats(s.cell, "cell") +
         format_gap_stats(s.all, "all");
}

}  // namespace colgen::tools
