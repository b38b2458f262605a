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

// Solves a planted pose instance and a planted cell instance and prints the
// recovered groups with their bounds.

#include <cstdio>

#include "colgen/colgen.hpp"

namespace {

void Print(const char* name, const colgen::ColgenResult& r) {
  std::printf("%s: lower %.4f upper %.4f gap %.2e iterations %d triples %zu\n", name,
              r.bounds.lower, r.bounds.upper, r.bounds.normalized_gap, r.state.iteration,
              r.state.triples.size());
  for (int j : r.bounds.upper_solution) {
    const auto& q = r.state.pool[j];
    std::printf("  %-11s cost %8.4f  {", std::string(colgen::to_string(q.kind)).c_str(), q.cost);
    for (std::size_t i = 0; i < q.elements.size(); ++i) {
      std::printf("%s%d", i ? ", " : "", q.elements[i]);
    }
    std::printf("}\n");
  }
}

}  // namespace

int main() {
  colgen::SolveConfig cfg;
  auto pose = colgen::planted_pose_instance(3, 5, 1);
  Print("pose, 3 people x 5 parts", colgen::run_colgen(colgen::PoseProblem(pose), cfg));
  auto cells = colgen::planted_cell_instance(4, 3, 1);
  Print("cells, 4 clusters x 3", colgen::run_colgen(colgen::CellProblem(cells), cfg));
  return 0;
}
