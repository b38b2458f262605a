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

// Set packing over an explicitly listed column universe. Pricing for element
// d scans the columns that contain d.

#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "colgen/column.hpp"
#include "colgen/error.hpp"
#include "colgen/master.hpp"

namespace colgen {

class FiniteUniverseProblem : public PricingProblem {
 public:
  FiniteUniverseProblem(int num_elements, std::vector<Column> universe)
      : n_(num_elements), universe_(std::move(universe)) {
    for (auto& q : universe_) {
      std::sort(q.elements.begin(), q.elements.end());
      std::sort(q.global_elements.begin(), q.global_elements.end());
      if (q.elements.empty() ||
          std::adjacent_find(q.elements.begin(), q.elements.end()) !=
              q.elements.end()) {
        throw Error(ErrorCode::kInvalidColumn, "empty or repeated elements");
      }
      if (q.elements.front() < 0 || q.elements.back() >= n_) {
        throw Error(ErrorCode::kInvalidColumn, "element out of range");
      }
    }
  }

  const std::vector<Column>& universe() const { return universe_; }

  int num_elements() const override { return n_; }
  int num_element_rows() const override { return n_; }
  double element_rhs(int) const override { return 1.0; }

  void column_entries(const Column& q,
                      std::vector<std::pair<int, double>>& out) const override {
    for (int d : q.elements) out.emplace_back(d, 1.0);
  }

  void validate_column(const Column& q) const override {
    for (const auto& u : universe_) {
      if (same_column(u, q)) return;
    }
    throw Error(ErrorCode::kInvalidColumn, "column not in universe");
  }

  std::vector<ColumnKind> triple_kinds() const override {
    std::set<ColumnKind> kinds;
    for (const auto& q : universe_) kinds.insert(q.kind);
    return {kinds.begin(), kinds.end()};
  }
  bool triple_allowed(const TripleRow&) const override { return true; }

  int num_pricing_tasks() const override { return n_; }

  PricingResult price(int task, const DualView& duals) const override {
    PricingResult res;
    res.reduced_cost = 0.0;
    for (const auto& q : universe_) {
      if (!q.contains(task)) continue;
      double rc = reduced_cost(*this, q, duals);
      if (!res.column || rc < res.reduced_cost) {
        res.column = q;
        res.column->anchor = task;
        res.reduced_cost = rc;
      }
    }
    return res;
  }

  std::vector<Column> enumerate_task(int task, const DualView& duals,
                                     double threshold,
                                     std::size_t limit) const override {
    std::vector<Column> out;
    for (const auto& q : universe_) {
      if (q.contains(task) && reduced_cost(*this, q, duals) <= threshold) {
        if (out.size() >= limit) {
          throw Error(ErrorCode::kInstanceTooLarge, "enumeration limit");
        }
        out.push_back(q);
      }
    }
    return out;
  }

 private:
  int n_;
  std::vector<Column> universe_;
};

inline Column make_cell_column(std::vector<int> elements, double cost) {
  Column q;
  q.kind = ColumnKind::kCell;
  std::sort(elements.begin(), elements.end());
  q.elements = std::move(elements);
  q.cost = cost;
  q.anchor = q.elements.empty() ? -1 : q.elements.front();
  return q;
}

}  // namespace colgen
