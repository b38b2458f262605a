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

// Depth-first search shared by the pricing oracles.
//
// Variables are split into groups; at most one variable per group is set.
// Objective:
//   base + sum linear_k x_k + sum_{k<l} pairwise_kl x_k x_l
//        + sum_t penalty_t [at least two members of t set]
// subject to an optional knapsack sum weight_k x_k <= capacity.
// Triple members that are already set before the search are counted through
// Triple::base_count; triple penalties must be nonnegative.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "colgen/error.hpp"

namespace colgen::internal {

class GroupSearch {
 public:
  struct Triple {
    std::vector<int> vars;  // free members
    int base_count = 0;     // members already set
    double penalty = 0.0;
  };

  std::vector<std::vector<int>> groups;
  std::vector<double> linear;
  std::vector<double> pairwise;  // dense, symmetric, num_vars^2
  std::vector<double> weight;    // empty when unconstrained
  double capacity = std::numeric_limits<double>::infinity();
  std::vector<Triple> triples;
  double base = 0.0;
  bool use_bound = true;

  explicit GroupSearch(int num_vars)
      : linear(num_vars, 0.0),
        pairwise(static_cast<std::size_t>(num_vars) * num_vars, 0.0),
        nv_(num_vars) {}

  double& phi(int a, int b) { return pairwise[static_cast<std::size_t>(a) * nv_ + b]; }

  void add_pair(int a, int b, double v) {
    phi(a, b) += v;
    phi(b, a) += v;
  }

  struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::vector<int> chosen;  // sorted variable ids
  };

  Best minimize() {
    prepare();
    mode_min_ = true;
    best_ = Best{};
    dfs(0);
    std::sort(best_.chosen.begin(), best_.chosen.end());
    return best_;
  }

  // Calls visit(value, chosen) for every feasible assignment with value <=
  // threshold. Throws kInstanceTooLarge past `limit` hits.
  void enumerate(double threshold, std::size_t limit,
                 const std::function<void(double, const std::vector<int>&)>& visit) {
    prepare();
    mode_min_ = false;
    threshold_ = threshold;
    limit_ = limit;
    hits_ = 0;
    visit_ = &visit;
    dfs(0);
  }

 private:
  void prepare() {
    const int ng = static_cast<int>(groups.size());
    group_of_.assign(nv_, -1);
    for (int g = 0; g < ng; ++g) {
      for (int k : groups[g]) group_of_[k] = g;
    }
    var_triples_.assign(nv_, {});
    count_.assign(triples.size(), 0);
    for (std::size_t t = 0; t < triples.size(); ++t) {
      if (triples[t].penalty < 0.0) {
        throw Error(ErrorCode::kValidationError, "negative triple penalty");
      }
      count_[t] = triples[t].base_count;
      for (int k : triples[t].vars) var_triples_[k].push_back(static_cast<int>(t));
    }
    // Tail sums of the cheapest cross-group pair per group pair.
    pair_tail_.assign(ng + 1, 0.0);
    for (int g = ng - 1; g >= 0; --g) {
      double s = pair_tail_[g + 1];
      for (int h = g + 1; h < ng; ++h) {
        double m = 0.0;
        for (int a : groups[g]) {
          for (int b : groups[h]) m = std::min(m, phi(a, b));
        }
        s += m;
      }
      pair_tail_[g] = s;
    }
    acc_ = linear;
    value_ = base;
    load_ = 0.0;
    chosen_.clear();
  }

  double bound(int g) const {
    double b = value_ + pair_tail_[g];
    for (std::size_t h = g; h < groups.size(); ++h) {
      double m = 0.0;
      for (int k : groups[h]) m = std::min(m, acc_[k]);
      b += m;
    }
    return b;
  }

  void set_var(int k, int sign) {
    if (sign > 0) {
      value_ += acc_[k];
      for (int t : var_triples_[k]) {
        if (++count_[t] == 2) value_ += triples[t].penalty;
      }
    } else {
      for (int t : var_triples_[k]) {
        if (count_[t]-- == 2) value_ -= triples[t].penalty;
      }
    }
    for (int j = 0; j < nv_; ++j) acc_[j] += sign * phi(k, j);
    if (sign < 0) value_ -= acc_[k];
    if (!weight.empty()) load_ += sign * weight[k];
    if (sign > 0) {
      chosen_.push_back(k);
    } else {
      chosen_.pop_back();
    }
  }

  void leaf() {
    if (mode_min_) {
      if (value_ < best_.value) {
        best_.value = value_;
        best_.chosen = chosen_;
      }
      return;
    }
    if (value_ <= threshold_) {
      if (++hits_ > limit_) {
        throw Error(ErrorCode::kInstanceTooLarge, "enumeration limit exceeded");
      }
      std::vector<int> sorted = chosen_;
      std::sort(sorted.begin(), sorted.end());
      (*visit_)(value_, sorted);
    }
  }

  void dfs(int g) {
    if (g == static_cast<int>(groups.size())) {
      leaf();
      return;
    }
    if (use_bound || !mode_min_) {
      double cut = mode_min_ ? best_.value : threshold_;
      double b = bound(g);
      if (mode_min_ ? b >= cut : b > cut + 1e-12) return;
    }
    // Cheapest option first so good incumbents appear early.
    std::vector<int> order = groups[g];
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return acc_[a] < acc_[b]; });
    for (int k : order) {
      if (!weight.empty() && load_ + weight[k] > capacity + 1e-12) continue;
      set_var(k, +1);
      dfs(g + 1);
      set_var(k, -1);
    }
    dfs(g + 1);  // group left empty
  }

  int nv_;
  std::vector<int> group_of_;
  std::vector<std::vector<int>> var_triples_;
  std::vector<int> count_;
  std::vector<double> pair_tail_;
  std::vector<double> acc_;
  double value_ = 0.0;
  double load_ = 0.0;
  std::vector<int> chosen_;

  bool mode_min_ = true;
  Best best_;
  double threshold_ = 0.0;
  std::size_t limit_ = 0;
  std::size_t hits_ = 0;
  const std::function<void(double, const std::vector<int>&)>* visit_ = nullptr;
};

}  // namespace colgen::internal
