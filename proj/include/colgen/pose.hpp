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

// Multi-person pose segmentation as set packing over global and local poses.
//
// Global pose: at most one key-point per part, at least one on a global part.
// Local pose: key-points of a single part around one anchor key-point that
// must itself belong to a selected global pose.
//
// Master rows over D key-points (rhs in brackets):
//   family 1, row d       [1]: global poses containing d + local poses with d
//                              as a non-anchor member
//   family 2, row D + d   [1]: local poses containing d
//   family 3, row 2D + d  [0]: local poses anchored at d - global poses with d

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "colgen/column.hpp"
#include "colgen/error.hpp"
#include "colgen/internal/group_search.hpp"
#include "colgen/master.hpp"

namespace colgen {

inline constexpr int kMaxPartSize = 20;

struct PoseInstance {
  int num_keypoints = 0;
  int num_parts = 0;
  std::vector<int> part_of;
  std::vector<int> global_parts;                  // sorted part ids
  std::vector<double> theta;
  std::vector<double> phi;                        // dense D*D, zero default
  std::vector<std::pair<int, int>> part_tree;     // un-augmented tree edges
  int root_part = 0;                              // augmentation root (neck)
  std::vector<std::string> part_names;            // optional, for I/O
  double cost_offset = 0.0;

  static PoseInstance make(int num_keypoints, int num_parts) {
    PoseInstance p;
    p.num_keypoints = num_keypoints;
    p.num_parts = num_parts;
    p.part_of.assign(num_keypoints, 0);
    p.theta.assign(num_keypoints, 0.0);
    p.phi.assign(static_cast<std::size_t>(num_keypoints) * num_keypoints, 0.0);
    return p;
  }

  double f(int a, int b) const {
    return phi[static_cast<std::size_t>(a) * num_keypoints + b];
  }
  void set_phi(int a, int b, double v) {
    phi[static_cast<std::size_t>(a) * num_keypoints + b] = v;
    phi[static_cast<std::size_t>(b) * num_keypoints + a] = v;
  }

  bool is_global_part(int r) const {
    return std::binary_search(global_parts.begin(), global_parts.end(), r);
  }
  bool is_global_keypoint(int d) const { return is_global_part(part_of[d]); }

  std::vector<std::vector<int>> keypoints_by_part() const {
    std::vector<std::vector<int>> out(num_parts);
    for (int d = 0; d < num_keypoints; ++d) out[part_of[d]].push_back(d);
    return out;
  }

  // Parts adjacent in the tree, plus root-to-everything augmentation.
  std::vector<std::vector<char>> part_links() const {
    std::vector<std::vector<char>> link(num_parts, std::vector<char>(num_parts, 0));
    for (auto [a, b] : part_tree) link[a][b] = link[b][a] = 1;
    for (int r = 0; r < num_parts; ++r) {
      link[r][r] = 1;
      link[root_part][r] = link[r][root_part] = 1;
    }
    return link;
  }

  void validate() const {
    auto fail = [](const std::string& m) {
      throw Error(ErrorCode::kValidationError, m);
    };
    const int n = num_keypoints;
    if (n < 0 || num_parts < 1) fail("need num_keypoints >= 0 and num_parts >= 1");
    if (static_cast<int>(part_of.size()) != n) fail("part_of size");
    if (static_cast<int>(theta.size()) != n) fail("theta size");
    if (phi.size() != static_cast<std::size_t>(n) * n) fail("phi size");
    if (root_part < 0 || root_part >= num_parts) fail("root_part out of range");
    if (!part_names.empty() && static_cast<int>(part_names.size()) != num_parts) {
      fail("part_names size");
    }
    if (global_parts.empty()) fail("global_parts must be nonempty");
    for (std::size_t i = 0; i < global_parts.size(); ++i) {
      if (global_parts[i] < 0 || global_parts[i] >= num_parts) fail("global part out of range");
      if (i > 0 && global_parts[i] <= global_parts[i - 1]) fail("global_parts must be sorted, distinct");
    }
    if (!std::isfinite(cost_offset)) fail("cost_offset not finite");
    for (int d = 0; d < n; ++d) {
      if (part_of[d] < 0 || part_of[d] >= num_parts) {
        fail("keypoint " + std::to_string(d) + " has no valid part");
      }
      if (!std::isfinite(theta[d])) fail("theta not finite");
    }
    // Tree: num_parts - 1 edges, connected, no self loops.
    if (static_cast<int>(part_tree.size()) != num_parts - 1) fail("part_tree is not a tree");
    std::vector<std::vector<int>> adj(num_parts);
    for (auto [a, b] : part_tree) {
      if (a < 0 || b < 0 || a >= num_parts || b >= num_parts || a == b) {
        fail("bad part_tree edge");
      }
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::vector<char> seen(num_parts, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int r = stack.back();
      stack.pop_back();
      for (int s : adj[r]) {
        if (!seen[s]) {
          seen[s] = 1;
          ++count;
          stack.push_back(s);
        }
      }
    }
    if (count != num_parts) fail("part_tree is not a tree");
    auto link = part_links();
    for (int a = 0; a < n; ++a) {
      if (f(a, a) != 0.0) fail("phi(d,d) must be 0");
      for (int b = 0; b < n; ++b) {
        if (!std::isfinite(f(a, b))) fail("phi not finite");
        if (f(a, b) != f(b, a)) {
          fail("phi not symmetric at (" + std::to_string(a) + "," + std::to_string(b) + ")");
        }
        if (f(a, b) != 0.0 && !link[part_of[a]][part_of[b]]) {
          fail("phi between parts without a tree edge");
        }
      }
    }
  }
};

struct PoseDuals {
  std::vector<double> lambda1, lambda2, lambda3;
  std::vector<TripleRow> triples;  // lambda4 on global, lambda5 on local rows

  static PoseDuals zeros(int d) {
    PoseDuals p;
    p.lambda1.assign(d, 0.0);
    p.lambda2.assign(d, 0.0);
    p.lambda3.assign(d, 0.0);
    return p;
  }

  // Stacked element-row layout used by the master LP.
  std::vector<double> stacked() const {
    std::vector<double> v = lambda1;
    v.insert(v.end(), lambda2.begin(), lambda2.end());
    v.insert(v.end(), lambda3.begin(), lambda3.end());
    return v;
  }
};

namespace internal {

inline void check_sorted_ids(const PoseInstance& inst, const std::vector<int>& el) {
  if (el.empty()) throw Error(ErrorCode::kInvalidColumn, "empty pose");
  for (std::size_t i = 0; i < el.size(); ++i) {
    if (el[i] < 0 || el[i] >= inst.num_keypoints || (i > 0 && el[i - 1] >= el[i])) {
      throw Error(ErrorCode::kInvalidColumn, "pose elements must be sorted ids");
    }
  }
}

inline double pair_sum(const PoseInstance& inst, const std::vector<int>& el) {
  double s = 0.0;
  for (std::size_t i = 0; i < el.size(); ++i) {
    for (std::size_t j = i + 1; j < el.size(); ++j) s += inst.f(el[i], el[j]);
  }
  return s;
}

}  // namespace internal

inline void validate_global_pose(const PoseInstance& inst, const std::vector<int>& el) {
  internal::check_sorted_ids(inst, el);
  std::vector<char> used(inst.num_parts, 0);
  bool has_global = false;
  for (int d : el) {
    if (used[inst.part_of[d]]++) {
      throw Error(ErrorCode::kInvalidColumn, "global pose repeats a part");
    }
    has_global = has_global || inst.is_global_keypoint(d);
  }
  if (!has_global) throw Error(ErrorCode::kInvalidColumn, "global pose has no global part");
}

inline void validate_local_pose(const PoseInstance& inst, const std::vector<int>& el,
                                int anchor) {
  internal::check_sorted_ids(inst, el);
  if (!std::binary_search(el.begin(), el.end(), anchor)) {
    throw Error(ErrorCode::kInvalidColumn, "local pose anchor not a member");
  }
  for (int d : el) {
    if (inst.part_of[d] != inst.part_of[anchor]) {
      throw Error(ErrorCode::kInvalidColumn, "local pose mixes parts");
    }
  }
}

// Gamma_q = sum theta + sum_{pairs} phi + offset.
inline double global_pose_cost(const PoseInstance& inst, std::vector<int> el,
                               double offset) {
  std::sort(el.begin(), el.end());
  validate_global_pose(inst, el);
  double c = offset + internal::pair_sum(inst, el);
  for (int d : el) c += inst.theta[d];
  return c;
}

inline double global_pose_cost(const PoseInstance& inst, std::vector<int> el) {
  return global_pose_cost(inst, std::move(el), inst.cost_offset);
}

// Psi_q = sum over non-anchor members of theta + sum_{pairs} phi.
inline double local_pose_cost(const PoseInstance& inst, std::vector<int> el,
                              int anchor) {
  std::sort(el.begin(), el.end());
  validate_local_pose(inst, el, anchor);
  double c = internal::pair_sum(inst, el);
  for (int d : el) {
    if (d != anchor) c += inst.theta[d];
  }
  return c;
}

inline Column make_global_column(const PoseInstance& inst, std::vector<int> el,
                                 int anchor, double offset) {
  Column q;
  q.kind = ColumnKind::kGlobalPose;
  std::sort(el.begin(), el.end());
  q.cost = global_pose_cost(inst, el, offset);
  q.elements = el;
  q.global_elements = std::move(el);
  q.anchor = anchor;
  return q;
}

inline Column make_local_column(const PoseInstance& inst, std::vector<int> el,
                                int anchor) {
  Column q;
  q.kind = ColumnKind::kLocalPose;
  std::sort(el.begin(), el.end());
  q.cost = local_pose_cost(inst, el, anchor);
  q.elements = std::move(el);
  q.global_elements = {anchor};
  q.anchor = anchor;
  return q;
}

struct PosePricing {
  Column column;
  double reduced_cost = 0.0;
};

namespace internal {

inline double at_or_zero(std::span<const double> v, int i) {
  return v.empty() ? 0.0 : v[i];
}

// Subsets of part(anchor) containing the anchor. Linear terms theta + l1 + l2,
// constant (l2 + l3) at the anchor, penalties lambda5.
inline GroupSearch make_local_search(const PoseInstance& inst, int anchor,
                                     std::span<const double> l1,
                                     std::span<const double> l2,
                                     std::span<const double> l3,
                                     std::span<const TripleRow> triples,
                                     std::vector<int>& free_ids) {
  free_ids.clear();
  int part_size = 0;
  for (int d = 0; d < inst.num_keypoints; ++d) {
    if (inst.part_of[d] != inst.part_of[anchor]) continue;
    ++part_size;
    if (d != anchor) free_ids.push_back(d);
  }
  if (part_size > kMaxPartSize) {
    throw Error(ErrorCode::kPartTooLarge,
                "part " + std::to_string(inst.part_of[anchor]) + " has " +
                    std::to_string(part_size) + " key-points");
  }
  const int k = static_cast<int>(free_ids.size());
  GroupSearch s(k);
  s.base = at_or_zero(l2, anchor) + at_or_zero(l3, anchor);
  for (int i = 0; i < k; ++i) {
    int d = free_ids[i];
    s.groups.push_back({i});
    s.linear[i] = inst.theta[d] + at_or_zero(l1, d) + at_or_zero(l2, d) + inst.f(anchor, d);
    for (int j = i + 1; j < k; ++j) s.add_pair(i, j, inst.f(d, free_ids[j]));
  }
  for (const auto& t : triples) {
    if (t.applies_to != ColumnKind::kLocalPose || t.dual <= 0.0) continue;
    GroupSearch::Triple tr;
    tr.penalty = t.dual;
    for (int m : t.members) {
      if (m == anchor) {
        ++tr.base_count;
      } else {
        auto it = std::lower_bound(free_ids.begin(), free_ids.end(), m);
        if (it != free_ids.end() && *it == m) tr.vars.push_back(static_cast<int>(it - free_ids.begin()));
      }
    }
    if (tr.base_count + static_cast<int>(tr.vars.size()) >= 2) s.triples.push_back(std::move(tr));
  }
  s.use_bound = k + 1 > 16;
  return s;
}

// Global poses containing the anchor: one group per other part. Linear terms
// theta + l1 - l3 + phi(anchor, .), penalties lambda4.
inline GroupSearch make_global_search(const PoseInstance& inst, int anchor,
                                      std::span<const double> l1,
                                      std::span<const double> l3,
                                      std::span<const TripleRow> triples,
                                      double offset, std::vector<int>& var_ids) {
  var_ids.clear();
  std::vector<std::vector<int>> by_part = inst.keypoints_by_part();
  std::vector<int> index(inst.num_keypoints, -1);
  std::vector<std::vector<int>> groups;
  for (int r = 0; r < inst.num_parts; ++r) {
    if (r == inst.part_of[anchor] || by_part[r].empty()) continue;
    std::vector<int> g;
    for (int d : by_part[r]) {
      index[d] = static_cast<int>(var_ids.size());
      g.push_back(index[d]);
      var_ids.push_back(d);
    }
    groups.push_back(std::move(g));
  }
  const int k = static_cast<int>(var_ids.size());
  GroupSearch s(k);
  s.groups = std::move(groups);
  s.base = inst.theta[anchor] + at_or_zero(l1, anchor) - at_or_zero(l3, anchor) + offset;
  for (int i = 0; i < k; ++i) {
    int d = var_ids[i];
    s.linear[i] = inst.theta[d] + at_or_zero(l1, d) - at_or_zero(l3, d) + inst.f(anchor, d);
    for (int j = i + 1; j < k; ++j) {
      if (inst.part_of[d] != inst.part_of[var_ids[j]]) s.add_pair(i, j, inst.f(d, var_ids[j]));
    }
  }
  for (const auto& t : triples) {
    if (t.applies_to != ColumnKind::kGlobalPose || t.dual <= 0.0) continue;
    GroupSearch::Triple tr;
    tr.penalty = t.dual;
    for (int m : t.members) {
      if (m == anchor) {
        ++tr.base_count;
      } else if (index[m] >= 0) {
        tr.vars.push_back(index[m]);
      }
    }
    if (tr.base_count + static_cast<int>(tr.vars.size()) >= 2) s.triples.push_back(std::move(tr));
  }
  s.use_bound = true;
  return s;
}

inline std::vector<int> merge_anchor(int anchor, const std::vector<int>& chosen,
                                     const std::vector<int>& ids) {
  std::vector<int> el{anchor};
  for (int i : chosen) el.push_back(ids[i]);
  std::sort(el.begin(), el.end());
  return el;
}

}  // namespace internal

// Minimum over local poses anchored at `anchor` of
//   (l2 + l3)_anchor + sum_{non-anchor members} (l1 + l2) + Psi
//   + sum lambda5 [>= 2 members of c].
inline PosePricing price_local(const PoseInstance& inst, int anchor,
                               const PoseDuals& duals) {
  std::vector<int> ids;
  auto s = internal::make_local_search(inst, anchor, duals.lambda1, duals.lambda2,
                                       duals.lambda3, duals.triples, ids);
  auto best = s.minimize();
  PosePricing out;
  out.column = make_local_column(inst, internal::merge_anchor(anchor, best.chosen, ids), anchor);
  out.reduced_cost = best.value;
  return out;
}

enum class GlobalMethod { kAuto, kDynamicProgram, kBranchAndBound };

namespace internal {

// Tree DP with the root part's state fixed to the anchor. Every phi(anchor, .)
// term, whether from a tree edge or an augmentation edge, becomes unary.
inline std::pair<double, std::vector<int>> global_tree_dp(
    const PoseInstance& inst, int anchor, std::span<const double> l1,
    std::span<const double> l3, double offset) {
  const int root = inst.part_of[anchor];
  auto by_part = inst.keypoints_by_part();
  std::vector<std::vector<int>> adj(inst.num_parts);
  for (auto [a, b] : inst.part_tree) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> parent(inst.num_parts, -1), order;
  std::vector<char> seen(inst.num_parts, 0);
  std::queue<int> bfs;
  bfs.push(root);
  seen[root] = 1;
  while (!bfs.empty()) {
    int r = bfs.front();
    bfs.pop();
    order.push_back(r);
    for (int s : adj[r]) {
      if (!seen[s]) {
        seen[s] = 1;
        parent[s] = r;
        bfs.push(s);
      }
    }
  }
  // msg[r][s]: best value of the subtree under r with r in state s
  // (0 = occluded, i = by_part[r][i-1]).
  std::vector<std::vector<double>> msg(inst.num_parts);
  // pick[c][s_parent]: argmin state of child c given the parent's state.
  std::vector<std::vector<int>> pick(inst.num_parts);
  for (int r = 0; r < inst.num_parts; ++r) {
    if (r == root) continue;
    msg[r].assign(by_part[r].size() + 1, 0.0);
    for (std::size_t i = 0; i < by_part[r].size(); ++i) {
      int d = by_part[r][i];
      msg[r][i + 1] = inst.theta[d] + at_or_zero(l1, d) - at_or_zero(l3, d) + inst.f(anchor, d);
    }
  }
  auto kp = [&](int r, int s) { return s == 0 ? -1 : by_part[r][s - 1]; };
  double total = inst.theta[anchor] + at_or_zero(l1, anchor) - at_or_zero(l3, anchor) + offset;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int c = *it;
    if (c == root) continue;
    int p = parent[c];
    if (p == root) {
      int arg = 0;
      for (std::size_t s = 1; s < msg[c].size(); ++s) {
        if (msg[c][s] < msg[c][arg]) arg = static_cast<int>(s);
      }
      pick[c] = {arg};
      total += msg[c][arg];
      continue;
    }
    pick[c].assign(msg[p].size(), 0);
    for (std::size_t sp = 0; sp < msg[p].size(); ++sp) {
      int dp = kp(p, static_cast<int>(sp));
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t sc = 0; sc < msg[c].size(); ++sc) {
        int dc = kp(c, static_cast<int>(sc));
        double v = msg[c][sc] + (dp >= 0 && dc >= 0 ? inst.f(dc, dp) : 0.0);
        if (v < best) {
          best = v;
          arg = static_cast<int>(sc);
        }
      }
      msg[p][sp] += best;
      pick[c][sp] = arg;
    }
  }
  // Decode top-down.
  std::vector<int> state(inst.num_parts, 0);
  std::vector<int> el{anchor};
  for (int r : order) {
    if (r == root) continue;
    int p = parent[r];
    state[r] = p == root ? pick[r][0] : pick[r][state[p]];
    if (state[r] > 0) el.push_back(kp(r, state[r]));
  }
  std::sort(el.begin(), el.end());
  return {total, el};
}

}  // namespace internal

// Minimum over global poses containing `anchor` (a key-point of a global part)
// of sum (theta + l1 - l3) + sum phi + offset + sum lambda4 [>= 2 of c].
inline PosePricing price_global(const PoseInstance& inst, int anchor,
                                const PoseDuals& duals, double offset,
                                GlobalMethod method = GlobalMethod::kAuto) {
  if (!inst.is_global_keypoint(anchor)) {
    throw Error(ErrorCode::kValidationError, "global pricing anchor not on a global part");
  }
  bool active_triples = false;
  for (const auto& t : duals.triples) {
    active_triples = active_triples || (t.applies_to == ColumnKind::kGlobalPose && t.dual > 0.0);
  }
  const bool on_root = inst.part_of[anchor] == inst.root_part;
  if (method == GlobalMethod::kAuto) {
    method = on_root && !active_triples ? GlobalMethod::kDynamicProgram
                                        : GlobalMethod::kBranchAndBound;
  }
  PosePricing out;
  if (method == GlobalMethod::kDynamicProgram) {
    if (!on_root || active_triples) {
      throw Error(ErrorCode::kValidationError,
                  "tree DP needs a root-part anchor and no active global triples");
    }
    auto [value, el] = internal::global_tree_dp(inst, anchor, duals.lambda1, duals.lambda3, offset);
    out.column = make_global_column(inst, std::move(el), anchor, offset);
    out.reduced_cost = value;
    return out;
  }
  std::vector<int> ids;
  auto s = internal::make_global_search(inst, anchor, duals.lambda1, duals.lambda3,
                                        duals.triples, offset, ids);
  auto best = s.minimize();
  out.column = make_global_column(inst, internal::merge_anchor(anchor, best.chosen, ids),
                                  anchor, offset);
  out.reduced_cost = best.value;
  return out;
}

inline PosePricing price_global(const PoseInstance& inst, int anchor,
                                const PoseDuals& duals,
                                GlobalMethod method = GlobalMethod::kAuto) {
  return price_global(inst, anchor, duals, inst.cost_offset, method);
}

// Anytime bound: -sum lambda1 - sum lambda2 - sum triple duals
//   + sum over global anchors min(0, global minimum)
//   + sum over all anchors min(0, local minimum).
// Family-3 rows have rhs 0, so lambda3 does not enter.
inline double pose_lower_bound(const PoseDuals& duals,
                               std::span<const double> global_minima,
                               std::span<const double> local_minima) {
  double lb = 0.0;
  for (double v : duals.lambda1) lb -= v;
  for (double v : duals.lambda2) lb -= v;
  for (const auto& t : duals.triples) lb -= t.dual;
  for (double m : global_minima) lb += std::min(0.0, m);
  for (double m : local_minima) lb += std::min(0.0, m);
  return lb;
}

// Calls fn(anchor, sorted elements, Psi) for every local pose of `part`.
template <typename Fn>
void for_each_local_pose(const PoseInstance& inst, int part, Fn&& fn) {
  std::vector<int> kps;
  for (int d = 0; d < inst.num_keypoints; ++d) {
    if (inst.part_of[d] == part) kps.push_back(d);
  }
  const int k = static_cast<int>(kps.size());
  if (k > kMaxPartSize) {
    throw Error(ErrorCode::kPartTooLarge, "part " + std::to_string(part) + " too large");
  }
  std::vector<int> el;
  for (int a = 0; a < k; ++a) {
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      if (!(mask >> a & 1)) continue;
      el.clear();
      double psi = 0.0;
      for (int i = 0; i < k; ++i) {
        if (!(mask >> i & 1)) continue;
        if (i != a) psi += inst.theta[kps[i]];
        for (int j = 0; j < i; ++j) {
          if (mask >> j & 1) psi += inst.f(kps[i], kps[j]);
        }
        el.push_back(kps[i]);
      }
      fn(kps[a], el, psi);
    }
  }
}

struct OmegaBounds {
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double epsilon = 0.0;
  std::vector<double> omega1;          // kInf on global-part key-points
  std::vector<double> anchored_gain;   // max(0, max -Psi over poses anchored at d)
};

inline OmegaBounds compute_omega_bounds(const PoseInstance& inst) {
  OmegaBounds ob;
  const int n = inst.num_keypoints;
  double max_theta = 0.0;
  for (double t : inst.theta) max_theta = std::max(max_theta, std::abs(t));
  ob.epsilon = 1e-4 * (1.0 + max_theta);
  ob.anchored_gain.assign(n, 0.0);
  std::vector<double> member_gain(n, 0.0);  // alpha2 per key-point
  for (int r = 0; r < inst.num_parts; ++r) {
    for_each_local_pose(inst, r, [&](int anchor, const std::vector<int>& el, double psi) {
      ob.anchored_gain[anchor] = std::max(ob.anchored_gain[anchor], -psi);
      for (int d : el) {
        if (d == anchor) continue;
        // Removing d from the pose.
        double bar = psi - inst.theta[d];
        for (int e : el) {
          if (e != d) bar -= inst.f(d, e);
        }
        member_gain[d] = std::max(member_gain[d], std::min(0.0, bar) - psi);
      }
    });
  }
  ob.omega1.assign(n, OmegaBounds::kInf);
  for (int d = 0; d < n; ++d) {
    if (inst.is_global_keypoint(d)) continue;
    std::vector<double> best(inst.num_parts, 0.0);
    for (int e = 0; e < n; ++e) {
      if (inst.part_of[e] != inst.part_of[d]) {
        best[inst.part_of[e]] = std::min(best[inst.part_of[e]], inst.f(d, e));
      }
    }
    double a1 = -inst.theta[d];
    for (int r = 0; r < inst.num_parts; ++r) {
      if (r != inst.part_of[d]) a1 -= best[r];
    }
    a1 = std::max(0.0, a1);
    ob.omega1[d] = ob.epsilon + std::max(a1 + ob.anchored_gain[d], member_gain[d]);
  }
  return ob;
}

// Bound on lambda4 for a global triple; kInf when two or more members lie on
// global parts. The gain from dropping {d2, d3} out of a covering global pose
// is bounded case by case over which members the pose contains.
inline double omega4_bound(const PoseInstance& inst, const OmegaBounds& ob,
                           const std::array<int, 3>& c) {
  int globals = 0;
  for (int m : c) globals += inst.is_global_keypoint(m);
  if (globals >= 2) return OmegaBounds::kInf;
  // Per part, cheapest joint phi towards the removed key-points.
  auto open_parts = [&](std::vector<int> removed, std::vector<int> closed) {
    double s = 0.0;
    for (int r = 0; r < inst.num_parts; ++r) {
      if (std::find(closed.begin(), closed.end(), r) != closed.end()) continue;
      double m = 0.0;
      for (int e = 0; e < inst.num_keypoints; ++e) {
        if (inst.part_of[e] != r) continue;
        double v = 0.0;
        for (int x : removed) v += inst.f(x, e);
        m = std::min(m, v);
      }
      s += m;
    }
    return s;
  };
  double best = OmegaBounds::kInf;
  for (int i = 0; i < 3; ++i) {
    const int d1 = c[i], d2 = c[(i + 1) % 3], d3 = c[(i + 2) % 3];
    if (globals == 1 && !inst.is_global_keypoint(d1)) continue;
    const int r1 = inst.part_of[d1], r2 = inst.part_of[d2], r3 = inst.part_of[d3];
    const double t2 = inst.theta[d2], t3 = inst.theta[d3];
    double a1 = 0.0;
    // Pose holds d1, d2, d3.
    a1 = std::max(a1, -t2 - t3 - inst.f(d1, d2) - inst.f(d1, d3) - inst.f(d2, d3) -
                          open_parts({d2, d3}, {r1, r2, r3}));
    // Pose holds d2, d3 but not d1 (part r1 may hold another key-point).
    a1 = std::max(a1, -t2 - t3 - inst.f(d2, d3) - open_parts({d2, d3}, {r2, r3}));
    // Pose holds d1 and exactly one of d2, d3; the other member's part may
    // hold a different key-point.
    a1 = std::max(a1, -t2 - inst.f(d1, d2) - open_parts({d2}, {r1, r2}));
    a1 = std::max(a1, -t3 - inst.f(d1, d3) - open_parts({d3}, {r1, r3}));
    best = std::min(best, ob.epsilon + a1 + ob.anchored_gain[d2] + ob.anchored_gain[d3]);
  }
  return best;
}

// Bound on lambda5 for a local triple (all members on one part).
inline double omega5_bound(const PoseInstance& inst, const OmegaBounds& ob,
                           const std::array<int, 3>& c) {
  double alpha = 0.0;
  for_each_local_pose(inst, inst.part_of[c[0]], [&](int anchor, const std::vector<int>& el,
                                                    double psi) {
    int hit = 0;
    for (int m : c) hit += std::binary_search(el.begin(), el.end(), m);
    if (hit < 2) return;
    std::vector<int> bar;
    for (int d : el) {
      bool drop = d != anchor && std::find(c.begin(), c.end(), d) != c.end();
      if (!drop) bar.push_back(d);
    }
    double psi_bar = 0.0;
    for (std::size_t i = 0; i < bar.size(); ++i) {
      if (bar[i] != anchor) psi_bar += inst.theta[bar[i]];
      for (std::size_t j = i + 1; j < bar.size(); ++j) psi_bar += inst.f(bar[i], bar[j]);
    }
    alpha = std::max(alpha, std::min(0.0, psi_bar) - psi);
  });
  return ob.epsilon + alpha;
}

class PoseProblem : public PricingProblem {
 public:
  explicit PoseProblem(PoseInstance inst, bool omega_bounds = false)
      : inst_(std::move(inst)) {
    inst_.validate();
    for (int d = 0; d < inst_.num_keypoints; ++d) {
      if (inst_.is_global_keypoint(d)) global_anchors_.push_back(d);
    }
    if (omega_bounds) omega_ = compute_omega_bounds(inst_);
  }

  const PoseInstance& instance() const { return inst_; }
  const std::optional<OmegaBounds>& omega() const { return omega_; }

  int num_elements() const override { return inst_.num_keypoints; }
  int num_element_rows() const override { return 3 * inst_.num_keypoints; }
  double element_rhs(int row) const override {
    return row < 2 * inst_.num_keypoints ? 1.0 : 0.0;
  }

  void column_entries(const Column& q,
                      std::vector<std::pair<int, double>>& out) const override {
    const int n = inst_.num_keypoints;
    if (q.kind == ColumnKind::kGlobalPose) {
      for (int d : q.elements) out.emplace_back(d, 1.0);
      for (int d : q.elements) out.emplace_back(2 * n + d, -1.0);
      return;
    }
    const int anchor = q.global_elements.front();
    for (int d : q.elements) {
      if (d != anchor) out.emplace_back(d, 1.0);
    }
    for (int d : q.elements) out.emplace_back(n + d, 1.0);
    out.emplace_back(2 * n + anchor, 1.0);
  }

  void validate_column(const Column& q) const override {
    if (q.kind == ColumnKind::kGlobalPose) {
      validate_global_pose(inst_, q.elements);
      if (q.global_elements != q.elements) {
        throw Error(ErrorCode::kInvalidColumn, "global pose global_elements != elements");
      }
    } else if (q.kind == ColumnKind::kLocalPose) {
      if (q.global_elements.size() != 1) {
        throw Error(ErrorCode::kInvalidColumn, "local pose needs exactly one global element");
      }
      validate_local_pose(inst_, q.elements, q.global_elements.front());
    } else {
      throw Error(ErrorCode::kInvalidColumn, "not a pose column");
    }
  }

  std::vector<ColumnKind> triple_kinds() const override {
    return {ColumnKind::kGlobalPose, ColumnKind::kLocalPose};
  }

  // Global triples span three distinct parts; local triples lie in one part.
  bool triple_allowed(const TripleRow& t) const override {
    const int a = inst_.part_of[t.members[0]], b = inst_.part_of[t.members[1]],
              c = inst_.part_of[t.members[2]];
    if (t.applies_to == ColumnKind::kGlobalPose) return a != b && b != c && a != c;
    if (t.applies_to == ColumnKind::kLocalPose) return a == b && b == c;
    return false;
  }

  // Tasks [0, D): local pricing per key-point; then global pricing per
  // key-point of a global part.
  int num_pricing_tasks() const override {
    return inst_.num_keypoints + static_cast<int>(global_anchors_.size());
  }

  PricingResult price(int task, const DualView& duals) const override {
    PoseDuals pd = split(duals);
    PosePricing r = task < inst_.num_keypoints
                        ? price_local(inst_, task, pd)
                        : price_global(inst_, global_anchors_[task - inst_.num_keypoints], pd);
    return PricingResult{std::move(r.column), r.reduced_cost};
  }

  std::vector<Column> enumerate_task(int task, const DualView& duals, double threshold,
                                     std::size_t limit) const override {
    PoseDuals pd = split(duals);
    std::vector<Column> out;
    std::vector<int> ids;
    if (task < inst_.num_keypoints) {
      auto s = internal::make_local_search(inst_, task, pd.lambda1, pd.lambda2, pd.lambda3,
                                           pd.triples, ids);
      s.enumerate(threshold, limit, [&](double, const std::vector<int>& chosen) {
        out.push_back(make_local_column(inst_, internal::merge_anchor(task, chosen, ids), task));
      });
    } else {
      const int anchor = global_anchors_[task - inst_.num_keypoints];
      auto s = internal::make_global_search(inst_, anchor, pd.lambda1, pd.lambda3, pd.triples,
                                            inst_.cost_offset, ids);
      s.enumerate(threshold, limit, [&](double, const std::vector<int>& chosen) {
        out.push_back(make_global_column(inst_, internal::merge_anchor(anchor, chosen, ids),
                                         anchor, inst_.cost_offset));
      });
    }
    return out;
  }

  std::vector<SlackColumn> slack_columns(std::span<const TripleRow> triples) const override {
    std::vector<SlackColumn> out;
    if (!omega_) return out;
    for (int d = 0; d < inst_.num_keypoints; ++d) {
      if (std::isfinite(omega_->omega1[d])) out.push_back({omega_->omega1[d], {{d, -1.0}}});
    }
    const int e = num_element_rows();
    for (std::size_t i = 0; i < triples.size(); ++i) {
      double w = triple_omega(triples[i]);
      if (std::isfinite(w)) out.push_back({w, {{e + static_cast<int>(i), -1.0}}});
    }
    return out;
  }

  double triple_omega(const TripleRow& t) const {
    if (!omega_) return OmegaBounds::kInf;
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto key = std::make_pair(t.applies_to, t.members);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double w = t.applies_to == ColumnKind::kGlobalPose ? omega4_bound(inst_, *omega_, t.members)
                                                       : omega5_bound(inst_, *omega_, t.members);
    cache_.emplace(key, w);
    return w;
  }

  PoseDuals split(const DualView& duals) const {
    const int n = inst_.num_keypoints;
    PoseDuals pd;
    pd.lambda1.assign(duals.element.begin(), duals.element.begin() + n);
    pd.lambda2.assign(duals.element.begin() + n, duals.element.begin() + 2 * n);
    pd.lambda3.assign(duals.element.begin() + 2 * n, duals.element.begin() + 3 * n);
    pd.triples.assign(duals.triples.begin(), duals.triples.end());
    return pd;
  }

 private:
  PoseInstance inst_;
  std::vector<int> global_anchors_;
  std::optional<OmegaBounds> omega_;
  mutable std::mutex cache_mu_;
  mutable std::map<std::pair<ColumnKind, std::array<int, 3>>, double> cache_;
};

inline LinearProgram build_pose_master(const PoseProblem& problem,
                                       std::span<const Column> pool,
                                       std::span<const TripleRow> triples,
                                       bool with_omega) {
  return build_master(problem, pool, triples, with_omega && problem.omega().has_value());
}

}  // namespace colgen
