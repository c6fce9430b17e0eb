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
#include <cmath>
#include <map>
#include <optional>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "triage/error.hpp"
#include "triage/evalharness.hpp"
#include "triage/parallel.hpp"

namespace triage::eval {

std::string_view to_string(Protocol protocol) {
  return protocol == Protocol::kSliding ? "sliding" : "cumulative";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "sliding") return Protocol::kSliding;
  if (name == "cumulative") return Protocol::kCumulative;
  throw Error(ErrorCode::kInvalidInput,
              fmt::format("unknown protocol '{}'", name));
}

namespace {

struct Cell {
  std::size_t test_index;
  int delta;
};

bool is_baseline(const ModelSpec& spec) {
  const auto* kind = std::get_if<classify::ClassifierKind>(&spec);
  return kind && *kind == classify::ClassifierKind::kBaselineMajority;
}

}  // namespace

std::vector<WindowResult> window_study(
    std::span<const corpus::IssueReport> reports, Protocol protocol,
    const ModelSpec& spec, const text::StopWords& stop_words,
    const WindowStudyConfig& config) {
  const auto closed = corpus::filter_closed(reports);
  if (closed.empty()) throw Error(ErrorCode::kEmptyStudy, "no closed reports");
  Month first = month_of(closed.front().opened_at);
  Month last = first;
  for (const auto& r : closed) {
    first = std::min(first, month_of(r.opened_at));
    last = std::max(last, month_of(r.opened_at));
  }
  const auto n_months = static_cast<std::size_t>(months_between(first, last)) + 1;
  std::vector<std::vector<corpus::IssueReport>> by_month(n_months);
  for (auto& r : closed) {
    by_month[static_cast<std::size_t>(months_between(first, month_of(r.opened_at)))]
        .push_back(r);
  }

  std::vector<Cell> cells;
  for (std::size_t i = 1; i < n_months; ++i) {
    if (by_month[i].empty()) continue;
    const int max_delta = std::min(config.max_delta, static_cast<int>(i));
    for (int d = 1; d <= max_delta; ++d) cells.push_back({i, d});
  }

  std::vector<std::optional<WindowResult>> slots(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    const auto [i, delta] = cells[c];
    std::vector<corpus::IssueReport> train;
    const std::size_t oldest = i - static_cast<std::size_t>(delta);
    const std::size_t newest = protocol == Protocol::kSliding ? oldest : i - 1;
    for (std::size_t m = oldest; m <= newest; ++m) {
      train.insert(train.end(), by_month[m].begin(), by_month[m].end());
    }
    if (train.empty()) return;
    LabeledData data;
    try {
      data = build_training_set(train, stop_words);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kEmptyTrainingSet) return;
      throw;
    }
    auto classes = data.y;
    std::sort(classes.begin(), classes.end());
    if (!is_baseline(spec) &&
        std::unique(classes.begin(), classes.end()) - classes.begin() < 2) {
      return;
    }
    std::shared_ptr<const classify::Predictor> model;
    try {
      model = classify::fit_spec(spec, data.X, data.y, data.vocabulary.size(),
                                 config.fit);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInsufficientData) return;
      throw;
    }
    const auto test = vectorize_closed(by_month[i], data.vocabulary, stop_words);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < test.X.size(); ++t) {
      correct += model->predict(test.X[t]) == test.y[t] ? 1 : 0;
    }
    slots[c] = WindowResult{add_months(first, static_cast<int>(i)),
                            delta,
                            protocol,
                            static_cast<double>(correct) /
                                static_cast<double>(test.X.size()),
                            data.X.size(),
                            test.X.size()};
  });

  std::vector<WindowResult> results;
  for (auto& s : slots) {
    if (s) results.push_back(*s);
  }
  if (results.empty()) {
    throw Error(ErrorCode::kEmptyStudy, "no feasible (test month, delta) cell");
  }
  return results;
}

void write_window_csv(std::ostream& out, std::span<const WindowResult> results) {
  out << "test_month,protocol,delta,accuracy\n";
  for (const auto& r : results) {
    out << fmt::format("{},{},{},{:.6f}\n", format_month(r.test_month),
                       to_string(r.protocol), r.delta, r.accuracy);
  }
}

std::vector<DeltaSummary> aggregate_by_delta(
    std::span<const WindowResult> results) {
  std::map<int, std::pair<double, std::size_t>> sums;
  for (const auto& r : results) {
    auto& [total, count] = sums[r.delta];
    total += r.accuracy;
    ++count;
  }
  std::vector<DeltaSummary> out;
  for (const auto& [delta, s] : sums) {
    out.push_back({delta, s.first / static_cast<double>(s.second), s.second});
  }
  return out;
}

void write_delta_csv(std::ostream& out, std::span<const DeltaSummary> summary) {
  out << "delta,mean_accuracy,cells\n";
  for (const auto& s : summary) {
    out << fmt::format("{},{:.6f},{}\n", s.delta, s.mean_accuracy, s.cells);
  }
}

LinearTrend fit_trend(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kShapeError, "x and y differ in length");
  }
  const std::size_t n = x.size();
  if (n < 3) throw Error(ErrorCode::kInsufficientData, "a trend needs 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::kInsufficientData, "x is constant");
  LinearTrend t;
  t.n = n;
  t.slope = sxy / sxx;
  t.intercept = my - t.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (t.intercept + t.slope * x[i]);
    sse += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  t.slope_stderr = std::sqrt(sse / dof / sxx);
  if (t.slope_stderr == 0.0) {
    t.p_value = t.slope == 0.0 ? 1.0 : 0.0;
    return t;
  }
  const double statistic = t.slope / t.slope_stderr;
  const boost::math::students_t dist(dof);
  t.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(statistic)));
  return t;
}

LinearTrend accuracy_trend(std::span<const WindowResult> results) {
  std::vector<double> x, y;
  for (const auto& r : results) {
    x.push_back(r.delta);
    y.push_back(r.accuracy);
  }
  return fit_trend(x, y);
}

}  // namespace triage::eval
