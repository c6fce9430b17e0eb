// Copyright 2026 The Issue Triage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Penalized mean-shift segmentation. The recursion is
//   F(t) = min_s F(s) + C(s, t) + penalty,  F(0) = -penalty,
// over admissible s (segments of at least min_segment points). A candidate s
// is discarded once F(s) + C(s, t) > F(t) for some t; with a minimum
// segment length the discard waits until s could no longer be the last
// admissible start paired with a split after t.

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "triage/driftmon.hpp"
#include "triage/error.hpp"

namespace triage::drift {

double segment_cost(std::span<const double> prefix_sum,
                    std::span<const double> prefix_sum_sq, std::size_t begin,
                    std::size_t end) {
  const double n = static_cast<double>(end - begin);
  const double sum = prefix_sum[end] - prefix_sum[begin];
  const double cost = prefix_sum_sq[end] - prefix_sum_sq[begin] - sum * sum / n;
  return cost < 0.0 ? 0.0 : cost;
}

ChangePointResult pelt_segment(std::span<const double> series, double penalty,
                               std::size_t min_segment) {
  if (!(penalty >= 0.0) || min_segment < 1) {
    throw Error(ErrorCode::kInvalidInput,
                "penalty must be >= 0 and min_segment >= 1");
  }
  const std::size_t n = series.size();
  if (n < 2 * min_segment) {
    throw Error(ErrorCode::kInsufficientData,
                fmt::format("{} points cannot hold two segments of {}", n,
                            min_segment));
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

  std::vector<double> sum(n + 1, 0.0), sum_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i + 1] = sum[i] + series[i];
    sum_sq[i + 1] = sum_sq[i] + series[i] * series[i];
  }

  std::vector<double> best(n + 1, kInf);
  std::vector<std::size_t> previous(n + 1, 0);
  std::vector<std::size_t> beaten_at(n + 1, kNever);
  best[0] = -penalty;
  std::vector<std::size_t> candidates;
  std::vector<double> values;
  for (std::size_t t = min_segment; t <= n; ++t) {
    const std::size_t fresh = t - min_segment;
    if (fresh == 0 || (fresh >= min_segment && best[fresh] < kInf)) {
      candidates.push_back(fresh);
    }
    values.resize(candidates.size());
    double f = kInf;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const std::size_t s = candidates[j];
      values[j] = best[s] + segment_cost(sum, sum_sq, s, t) + penalty;
      if (values[j] < f) {
        f = values[j];
        arg = s;
      }
    }
    best[t] = f;
    previous[t] = arg;

    std::size_t kept = 0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const std::size_t s = candidates[j];
      if (beaten_at[s] == kNever && values[j] - penalty > f) beaten_at[s] = t;
      if (beaten_at[s] == kNever || t + 1 < beaten_at[s] + min_segment) {
        candidates[kept++] = s;
      }
    }
    candidates.resize(kept);
  }

  ChangePointResult result;
  for (std::size_t t = n; t > 0; t = previous[t]) {
    if (previous[t] > 0) result.change_points.push_back(previous[t]);
  }
  std::reverse(result.change_points.begin(), result.change_points.end());
  result.total_cost = best[n];
  std::size_t begin = 0;
  for (std::size_t k = 0; k <= result.change_points.size(); ++k) {
    const std::size_t end = k < result.change_points.size() ? result.change_points[k] : n;
    result.segment_means.push_back((sum[end] - sum[begin]) /
                                   static_cast<double>(end - begin));
    begin = end;
  }
  return result;
}

}  // namespace triage::drift
