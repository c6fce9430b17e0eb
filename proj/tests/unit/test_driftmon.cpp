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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "triage/driftmon.hpp"
#include "triage/error.hpp"

using namespace triage;
using namespace triage::drift;

namespace {

double direct_sse(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s;
}

std::vector<double> step(std::size_t before, double a, std::size_t after, double b) {
  std::vector<double> x(before, a);
  x.insert(x.end(), after, b);
  return x;
}

}  // namespace

TEST_SUITE("driftmon") {
  TEST_CASE("segment cost from prefix sums") {
    const std::vector<double> x = {0.8, 0.9, 0.7, 0.85, 0.6};
    std::vector<double> s = {0.0}, s2 = {0.0};
    for (double v : x) {
      s.push_back(s.back() + v);
      s2.push_back(s2.back() + v * v);
    }
    CHECK(segment_cost(s, s2, 1, 4) == doctest::Approx(direct_sse(std::span(x).subspan(1, 3))));
    CHECK(segment_cost(s, s2, 2, 3) == 0.0);
  }

  TEST_CASE("segmentation finds clean steps and respects the minimum length") {
    const auto x = step(10, 0.9, 10, 0.6);
    const auto r = pelt_segment(x, 0.05, 2);
    CHECK(r.change_points == std::vector<std::size_t>{10});
    REQUIRE(r.segment_means.size() == 2);
    CHECK(r.segment_means[0] == doctest::Approx(0.9));
    CHECK(r.segment_means[1] == doctest::Approx(0.6));
    CHECK(r.total_cost == doctest::Approx(0.05));
    CHECK(pelt_segment(std::vector<double>(12, 0.5), 0.05, 2).change_points.empty());
    const auto short_step = step(10, 0.9, 2, 0.1);
    CHECK(pelt_segment(short_step, 0.05, 3).change_points == std::vector<std::size_t>{9});
    CHECK(pelt_segment(short_step, 0.05, 2).change_points == std::vector<std::size_t>{10});
  }

  TEST_CASE("segmentation errors") {
    CHECK_THROWS_AS(pelt_segment(std::vector<double>(3, 0.0), 0.05, 2), Error);
    CHECK_THROWS_AS(pelt_segment(std::vector<double>(8, 0.0), -1.0, 2), Error);
    CHECK_THROWS_AS(pelt_segment(std::vector<double>(8, 0.0), 0.05, 0), Error);
  }

  TEST_CASE("reported cost matches the segmentation it describes") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(40);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i / 13) * 2.0 + z(rng);
      const double penalty = 1.0 + trial % 5;
      const std::size_t m = 1 + trial % 3;
      const auto r = pelt_segment(x, penalty, m);
      std::vector<std::size_t> bounds = {0};
      bounds.insert(bounds.end(), r.change_points.begin(), r.change_points.end());
      bounds.push_back(x.size());
      double cost = penalty * static_cast<double>(r.change_points.size());
      for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
        CHECK(bounds[j + 1] - bounds[j] >= m);
        cost += direct_sse(std::span(x).subspan(bounds[j], bounds[j + 1] - bounds[j]));
      }
      CHECK(r.total_cost == doctest::Approx(cost).epsilon(1e-9));
    }
  }

  TEST_CASE("online detector alerts on drops only") {
    OnlineDetector up({0.05, 2, 4});
    for (double v : step(8, 0.6, 8, 0.9)) CHECK_FALSE(up.push(v));

    OnlineDetector down({0.05, 2, 4});
    std::optional<Alert> raised;
    const auto x = step(8, 0.9, 8, 0.6);
    for (double v : x) {
      const auto a = down.push(v);
      if (a) {
        CHECK_FALSE(raised);
        raised = a;
      }
    }
    REQUIRE(raised);
    CHECK(raised->boundary == 8);
    CHECK(raised->day == 10);  // two post-shift points are needed
    CHECK(raised->pre_mean == doctest::Approx(0.9));
    CHECK(down.alert());
    down.reset();
    CHECK(down.history().empty());
    CHECK_FALSE(down.alert());
    CHECK_THROWS_AS(OnlineDetector({0.05, 3, 5}), Error);
  }

  TEST_CASE("no decision before the minimum history") {
    OnlineDetector d({0.05, 2, 30});
    for (double v : step(8, 0.9, 8, 0.3)) CHECK_FALSE(d.push(v));
    const auto j = to_json(Alert{3, 2, 0.9, 0.5});
    CHECK(j["day"] == 3);
    CHECK(j["boundary"] == 2);
  }

  TEST_CASE("simulated series share noise across cells") {
    DriftSimConfig a;
    DriftSimConfig b = a;
    b.drop = 0.2;
    b.mode = DropMode::kGradual;
    const auto sa = simulate_series(a, 3);
    const auto sb = simulate_series(b, 3);
    REQUIRE(sa.size() == 200);
    for (std::size_t i = 0; i < 100; ++i) CHECK(sa[i] == sb[i]);
    CHECK(sa != simulate_series(a, 4));
    for (double v : sa) CHECK((v >= 0.0 && v <= 1.0));
    CHECK(scheduled_mean(a, 100) == 0.85);
    CHECK(scheduled_mean(a, 101) == doctest::Approx(0.75));
    CHECK(scheduled_mean(b, 150) == doctest::Approx(0.75));
    CHECK(scheduled_mean(b, 200) == doctest::Approx(0.65));
    b.drop = 0.9;
    CHECK_THROWS_AS(simulate_series(b, 0), Error);
    CHECK(parse_drop_mode("gradual") == DropMode::kGradual);
  }

  TEST_CASE("detection times count days after the drop") {
    DriftSimConfig config;
    config.n_days_before = 10;
    config.n_days_after = 10;
    std::vector<double> x = step(10, 0.85, 10, 0.55);
    const auto outcome = detect(config, x, {0.05, 2, 4});
    CHECK(outcome.detected);
    CHECK(outcome.detection_time == 2);
    CHECK(outcome.mean_accuracy_at_detection == doctest::Approx(0.75));
    const auto flat = detect(config, std::vector<double>(20, 0.85), {0.05, 2, 4});
    CHECK_FALSE(flat.detected);
  }

  TEST_CASE("study cells and CSV") {
    DriftSimConfig base;
    base.repetitions = 20;
    const std::vector<double> drops = {0.2, 0.1};
    const auto cells = run_simulation_study(base, drops, DetectorConfig::calibrated());
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].mode == DropMode::kSudden);
    CHECK(cells[3].mode == DropMode::kGradual);
    for (const auto& c : cells) {
      CHECK(c.repetitions == 20);
      CHECK(c.min_time <= c.avg_time);
      CHECK(c.avg_time <= c.max_time);
    }
    CHECK(run_cell(base, DetectorConfig::calibrated()).avg_time ==
          run_cell(base, DetectorConfig::calibrated()).avg_time);
    std::ostringstream out;
    write_study_csv(out, cells, DropMode::kGradual);
    CHECK(out.str().rfind("deterioration,min,avg,max,stddev,detection_rate,min_mean_accuracy\n", 0) == 0);
  }
}
