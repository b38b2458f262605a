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

// Detection scoring: assignment, precision/recall/F and region overlap.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "colgen/error.hpp"

namespace colgen {

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
  double cost = 0.0;
};

// Minimum-cost one-to-one assignment covering min(rows, cols). Potentials
// method, O(n^2 m) with n <= m.
inline Assignment hungarian(const std::vector<std::vector<double>>& cost) {
  if (cost.empty() || cost.front().empty()) {
    throw Error(ErrorCode::kEmptyMatrix, "empty cost matrix");
  }
  const std::size_t rows = cost.size(), cols = cost.front().size();
  for (const auto& r : cost) {
    if (r.size() != cols) throw Error(ErrorCode::kDimensionMismatch, "ragged cost matrix");
    for (double v : r) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kValidationError, "non-finite cost");
    }
  }
  const bool flip = rows > cols;
  const int n = static_cast<int>(flip ? cols : rows);
  const int m = static_cast<int>(flip ? rows : cols);
  auto a = [&](int i, int j) { return flip ? cost[j - 1][i - 1] : cost[i - 1][j - 1]; };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment out;
  for (int j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    int r = flip ? j - 1 : p[j] - 1, c = flip ? p[j] - 1 : j - 1;
    out.pairs.emplace_back(r, c);
    out.cost += cost[r][c];
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

// 0/0 is taken as 0 throughout.
inline Prf prf(long tp, long fp, long fn) {
  auto ratio = [](double a, double b) { return b == 0.0 ? 0.0 : a / b; };
  Prf r;
  r.precision = ratio(tp, tp + fp);
  r.recall = ratio(tp, tp + fn);
  r.f_score = ratio(2.0 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

// |A & B| / |A | B|; 0 when both are empty. Inputs need not be sorted.
inline double jaccard(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  const std::size_t uni = a.size() + b.size() - common.size();
  return uni == 0 ? 0.0 : static_cast<double>(common.size()) / static_cast<double>(uni);
}

struct Region {
  std::vector<double> centroid;
  std::vector<int> elements;
};

struct DetectionMatch {
  std::vector<std::pair<int, int>> pairs;  // (prediction, ground truth)
  std::vector<int> unmatched_predictions;
  std::vector<int> unmatched_ground_truth;
  double threshold = 0.0;
};

inline double centroid_distance(const Region& a, const Region& b) {
  if (a.centroid.size() != b.centroid.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "centroid dimensions differ");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.centroid.size(); ++k) {
    s += (a.centroid[k] - b.centroid[k]) * (a.centroid[k] - b.centroid[k]);
  }
  return std::sqrt(s);
}

// Assignment on centroid distance; assigned pairs farther than the threshold
// are dropped and count as one false positive plus one false negative.
inline DetectionMatch match_detections(const std::vector<Region>& pred,
                                       const std::vector<Region>& gt, double threshold) {
  DetectionMatch out;
  out.threshold = threshold;
  std::vector<char> pred_used(pred.size(), 0), gt_used(gt.size(), 0);
  if (!pred.empty() && !gt.empty()) {
    std::vector<std::vector<double>> d(pred.size(), std::vector<double>(gt.size()));
    for (std::size_t i = 0; i < pred.size(); ++i) {
      for (std::size_t j = 0; j < gt.size(); ++j) d[i][j] = centroid_distance(pred[i], gt[j]);
    }
    for (auto [i, j] : hungarian(d).pairs) {
      if (d[i][j] > threshold) continue;
      out.pairs.emplace_back(i, j);
      pred_used[i] = gt_used[j] = 1;
    }
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred_used[i]) out.unmatched_predictions.push_back(static_cast<int>(i));
  }
  for (std::size_t j = 0; j < gt.size(); ++j) {
    if (!gt_used[j]) out.unmatched_ground_truth.push_back(static_cast<int>(j));
  }
  return out;
}

struct EvalReport {
  long tp = 0, fp = 0, fn = 0;
  Prf scores;
  double mean_jaccard = 0.0;  // over matched pairs, 0 if none
  DetectionMatch match;
};

inline EvalReport evaluate_regions(const std::vector<Region>& pred,
                                   const std::vector<Region>& gt, double threshold) {
  EvalReport r;
  r.match = match_detections(pred, gt, threshold);
  r.tp = static_cast<long>(r.match.pairs.size());
  r.fp = static_cast<long>(r.match.unmatched_predictions.size());
  r.fn = static_cast<long>(r.match.unmatched_ground_truth.size());
  r.scores = prf(r.tp, r.fp, r.fn);
  double s = 0.0;
  for (auto [i, j] : r.match.pairs) s += jaccard(pred[i].elements, gt[j].elements);
  r.mean_jaccard = r.tp == 0 ? 0.0 : s / static_cast<double>(r.tp);
  return r;
}

}  // namespace colgen
