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

// Summary of normalized gaps over a batch of runs.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace colgen {

inline constexpr double kZeroGap = 1e-9;

struct GapStats {
  int count = 0;
  double zero_fraction = 0.0;
  std::vector<double> thresholds{0.16, 0.1, 0.01, 0.001, 0.0001};
  std::vector<double> under;  // fraction with gap < threshold, same order
};

inline GapStats gap_stats(const std::vector<double>& gaps) {
  GapStats s;
  s.count = static_cast<int>(gaps.size());
  s.under.assign(s.thresholds.size(), 0.0);
  if (gaps.empty()) return s;
  int zero = 0;
  std::vector<int> under(s.thresholds.size(), 0);
  for (double g : gaps) {
    zero += g <= kZeroGap;
    for (std::size_t k = 0; k < s.thresholds.size(); ++k) under[k] += g < s.thresholds[k];
  }
  const double n = static_cast<double>(gaps.size());
  s.zero_fraction = zero / n;
  for (std::size_t k = 0; k < under.size(); ++k) s.under[k] = under[k] / n;
  return s;
}

// Thresholds decrease, so each fraction is at most the one before it and at
// least the zero-gap fraction.
inline bool gap_stats_monotone(const GapStats& s) {
  for (std::size_t k = 0; k < s.under.size(); ++k) {
    if (s.under[k] < s.zero_fraction) return false;
    if (k > 0 && s.under[k] > s.under[k - 1]) return false;
  }
  return true;
}

// One line per bucket:  "zero_gap 0.9850" then "gap_under 0.16 0.9900" ...
inline std::string format_gap_stats(const GapStats& s, const std::string& label) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s instances %d\n", label.c_str(), s.count);
  out += buf;
  std::snprintf(buf, sizeof buf, "%s zero_gap %.4f\n", label.c_str(), s.zero_fraction);
  out += buf;
  for (std::size_t k = 0; k < s.thresholds.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s gap_under %g %.4f\n", label.c_str(), s.thresholds[k],
                  s.under[k]);
    out += buf;
  }
  return out;
}

}  // namespace colgen
