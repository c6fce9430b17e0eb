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

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "triage/error.hpp"
#include "triage/evalharness.hpp"

namespace triage::eval {

AccuracySeries daily_accuracy(std::span<const AssignmentOutcome> outcomes) {
  std::map<Day, std::pair<std::size_t, std::size_t>> tally;
  for (const auto& o : outcomes) {
    auto& [correct, total] = tally[day_of(o.opened_at)];
    correct += o.predicted == o.actual ? 1 : 0;
    ++total;
  }
  AccuracySeries series;
  series.reserve(tally.size());
  for (const auto& [day, t] : tally) {
    series.push_back({day,
                      static_cast<double>(t.first) / static_cast<double>(t.second),
                      t.second});
  }
  return series;
}

SolutionTimes solution_time_report(std::span<const corpus::IssueReport> reports,
                                   Day deployment, int window_months) {
  if (window_months < 1) {
    throw Error(ErrorCode::kInvalidInput, "window must be at least one month");
  }
  using std::chrono::year_month_day;
  const year_month_day d{deployment};
  const auto shifted = [&](int months) {
    const auto ym = add_months(d.year() / d.month(), months);
    const year_month_day candidate = ym / d.day();
    return Timestamp(Day(candidate.ok() ? candidate : ym / std::chrono::last));
  };
  const Timestamp start = shifted(-window_months);
  const Timestamp boundary{Day(deployment)};
  const Timestamp end = shifted(window_months);

  constexpr double kMsPerDay = 86'400'000.0;
  SolutionTimes out;
  double before = 0.0, after = 0.0;
  for (const auto& r : reports) {
    if (r.status != corpus::Status::kClosed) continue;
    const double days = static_cast<double>((*r.closed_at - r.opened_at).count()) /
                        kMsPerDay;
    if (r.opened_at >= start && r.opened_at < boundary) {
      before += days;
      ++out.n_before;
    } else if (r.opened_at >= boundary && r.opened_at < end) {
      after += days;
      ++out.n_after;
    }
  }
  if (out.n_before == 0 || out.n_after == 0) {
    throw Error(ErrorCode::kOneSidedData,
                fmt::format("{} closed reports before and {} after {}",
                            out.n_before, out.n_after, format_day(deployment)));
  }
  out.mean_days_before = before / static_cast<double>(out.n_before);
  out.mean_days_after = after / static_cast<double>(out.n_after);
  return out;
}

double effort_report(double reports_per_month, double seconds_per_assignment) {
  if (!(reports_per_month >= 0.0) || !(seconds_per_assignment > 0.0)) {
    throw Error(ErrorCode::kInvalidInput,
                "report count must be nonnegative and seconds positive");
  }
  constexpr double kHoursPerPersonMonth = 160.0;
  return reports_per_month * seconds_per_assignment * 12.0 /
         (3600.0 * kHoursPerPersonMonth);
}

}  // namespace triage::eval
