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

#pragma once

#include <algorithm>
#include <array>
#include <string_view>
#include <tuple>
#include <vector>

namespace colgen {

enum class ColumnKind { kGlobalPose, kLocalPose, kCell };

constexpr std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kGlobalPose: return "global_pose";
    case ColumnKind::kLocalPose: return "local_pose";
    case ColumnKind::kCell: return "cell";
  }
  return "unknown";
}

// One candidate subset. elements and global_elements are kept sorted.
struct Column {
  ColumnKind kind = ColumnKind::kCell;
  std::vector<int> elements;
  std::vector<int> global_elements;
  double cost = 0.0;
  int anchor = -1;

  bool contains(int e) const {
    return std::binary_search(elements.begin(), elements.end(), e);
  }

  // Identity used for de-duplication; cost and anchor are not part of it.
  auto key() const { return std::tie(kind, elements, global_elements); }
};

inline bool same_column(const Column& a, const Column& b) {
  return a.key() == b.key();
}

// Odd-set row over three elements: at most one selected column of kind
// applies_to may contain two or more of the members.
struct TripleRow {
  std::array<int, 3> members{};
  ColumnKind applies_to = ColumnKind::kCell;
  double dual = 0.0;

  static TripleRow make(int a, int b, int c, ColumnKind kind) {
    TripleRow t;
    t.members = {a, b, c};
    std::sort(t.members.begin(), t.members.end());
    t.applies_to = kind;
    return t;
  }

  bool operator==(const TripleRow& o) const {
    return members == o.members && applies_to == o.applies_to;
  }
};

inline int count_members(const std::vector<int>& sorted_elements,
                        const std::array<int, 3>& members) {
  int n = 0;
  for (int m : members) {
    n += std::binary_search(sorted_elements.begin(), sorted_elements.end(), m);
  }
  return n;
}

inline bool triple_covers(const TripleRow& t, const Column& q) {
  return t.applies_to == q.kind && count_members(q.elements, t.members) >= 2;
}

}  // namespace colgen
