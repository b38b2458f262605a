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

// Seeded instance generators. Output depends only on (params, seed).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "colgen/cell.hpp"
#include "colgen/pose.hpp"

namespace colgen {

struct PoseGenParams {
  int num_parts = 4;
  int num_global_parts = 1;  // parts 0 .. num_global_parts-1
  int min_keypoints_per_part = 1;
  int max_keypoints_per_part = 3;
  double theta_range = 3.0;  // uniform in [-range, range]
  double phi_range = 3.0;
  double phi_density = 1.0;  // chance that an admissible pair gets a term
};

struct CellGenParams {
  int num_superpixels = 8;
  double side = 4.0;  // points uniform in [0, side]^2
  double max_radius = 2.0;
  double max_area = 3.0;
  double min_area = 0.5;
  double max_area_each = 1.5;
  double theta_low = -3.0;
  double theta_high = 1.0;
  double phi_range = 3.0;
};

namespace internal {

inline double round_to(double v, double step) { return std::round(v / step) * step; }

// Values rounded to 1/64 so instance files round-trip exactly as decimals.
inline double draw(std::mt19937_64& rng, double lo, double hi) {
  return round_to(std::uniform_real_distribution<double>(lo, hi)(rng), 1.0 / 64);
}

}  // namespace internal

inline PoseInstance random_pose_instance(const PoseGenParams& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> sizes(g.num_parts);
  std::uniform_int_distribution<int> size_dist(g.min_keypoints_per_part,
                                               g.max_keypoints_per_part);
  int total = 0;
  for (int& s : sizes) total += (s = size_dist(rng));
  PoseInstance inst = PoseInstance::make(total, g.num_parts);
  int d = 0;
  for (int r = 0; r < g.num_parts; ++r) {
    for (int i = 0; i < sizes[r]; ++i) inst.part_of[d++] = r;
  }
  for (int r = 0; r < std::clamp(g.num_global_parts, 1, g.num_parts); ++r) inst.global_parts.push_back(r);
  inst.root_part = 0;
  for (int r = 1; r < g.num_parts; ++r) {
    inst.part_tree.emplace_back(std::uniform_int_distribution<int>(0, r - 1)(rng), r);
  }
  for (auto& t : inst.theta) t = internal::draw(rng, -g.theta_range, g.theta_range);
  auto link = inst.part_links();
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int a = 0; a < total; ++a) {
    for (int b = a + 1; b < total; ++b) {
      if (!link[inst.part_of[a]][inst.part_of[b]]) continue;
      if (coin(rng) >= g.phi_density) continue;
      inst.set_phi(a, b, internal::draw(rng, -g.phi_range, g.phi_range));
    }
  }
  return inst;
}

// K people, one key-point per person and part. Same-person pairs on linked
// parts attract, cross-person pairs repel; every person is a unique optimum.
inline PoseInstance planted_pose_instance(int num_people, int num_parts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int total = num_people * num_parts;
  PoseInstance inst = PoseInstance::make(total, num_parts);
  std::vector<int> person(total);
  // Shuffle key-point ids so persons are not contiguous.
  std::vector<int> ids(total);
  for (int i = 0; i < total; ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  for (int p = 0; p < num_people; ++p) {
    for (int r = 0; r < num_parts; ++r) {
      int d = ids[p * num_parts + r];
      inst.part_of[d] = r;
      person[d] = p;
    }
  }
  inst.global_parts = {0};
  inst.root_part = 0;
  for (int r = 1; r < num_parts; ++r) {
    inst.part_tree.emplace_back(std::uniform_int_distribution<int>(0, r - 1)(rng), r);
  }
  auto link = inst.part_links();
  for (int a = 0; a < total; ++a) {
    inst.theta[a] = internal::draw(rng, -1.5, -0.5);
    for (int b = a + 1; b < total; ++b) {
      if (!link[inst.part_of[a]][inst.part_of[b]]) continue;
      if (inst.part_of[a] == inst.part_of[b]) {
        inst.set_phi(a, b, 3.0);
      } else if (person[a] == person[b]) {
        inst.set_phi(a, b, internal::draw(rng, -2.5, -1.5));
      } else {
        inst.set_phi(a, b, 3.0);
      }
    }
  }
  return inst;
}

inline CellInstance random_cell_instance(const CellGenParams& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = g.num_superpixels;
  CellInstance c = CellInstance::make(n);
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = internal::draw(rng, 0.0, g.side);
    y[i] = internal::draw(rng, 0.0, g.side);
  }
  c.max_radius = g.max_radius;
  c.max_area = g.max_area;
  for (int i = 0; i < n; ++i) {
    c.area[i] = internal::draw(rng, g.min_area, g.max_area_each);
    c.area[i] = std::min(c.area[i], g.max_area);
    c.theta[i] = internal::draw(rng, g.theta_low, g.theta_high);
    for (int j = i + 1; j < n; ++j) {
      c.set_dist(i, j, internal::round_to(std::hypot(x[i] - x[j], y[i] - y[j]), 1.0 / 1024));
      if (c.d(i, j) < 2.0 * g.max_radius) {
        c.set_phi(i, j, internal::draw(rng, -g.phi_range, g.phi_range));
      }
    }
  }
  return c;
}

// K clusters of `size` super-pixels on a grid, clusters 4 radii apart.
inline CellInstance planted_cell_instance(int num_cells, int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = num_cells * size;
  CellInstance c = CellInstance::make(n);
  c.max_radius = 1.0;
  c.max_area = size + 0.5;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_cells))));
  std::vector<double> x(n), y(n);
  std::vector<int> cluster(n);
  for (int k = 0; k < num_cells; ++k) {
    double cx = 4.0 * (k % cols), cy = 4.0 * (k / cols);
    for (int i = 0; i < size; ++i) {
      int d = k * size + i;
      cluster[d] = k;
      x[d] = cx + internal::draw(rng, -0.2, 0.2);
      y[d] = cy + internal::draw(rng, -0.2, 0.2);
    }
  }
  for (int a = 0; a < n; ++a) {
    c.theta[a] = internal::draw(rng, -1.5, -0.5);
    for (int b = a + 1; b < n; ++b) {
      c.set_dist(a, b, internal::round_to(std::hypot(x[a] - x[b], y[a] - y[b]), 1.0 / 1024));
      if (cluster[a] == cluster[b]) c.set_phi(a, b, internal::draw(rng, -1.5, -0.5));
    }
  }
  return c;
}

}  // namespace colgen
