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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace triage::drift {

// ---- segmentation -----------------------------------------------------------

struct ChangePointResult {
  // Segment boundaries: segment j covers [b_j, b_{j+1}) with b_0 = 0 and a
  // final boundary at the series length, neither of which is listed.
  std::vector<std::size_t> change_points;
  std::vector<double> segment_means;
  // Sum of per-segment squared deviations plus penalty * #change_points.
  double total_cost = 0.0;
};

// Sum of squared deviations from the mean of x[begin, end), from prefix
// sums of x and x^2. Never negative.
double segment_cost(std::span<const double> prefix_sum,
                    std::span<const double> prefix_sum_sq, std::size_t begin,
                    std::size_t end);

// Exact penalized mean-shift segmentation with pruning. Every segment has
// at least `min_segment` points. Throws Error(kInsufficientData) when the
// series is shorter than 2 * min_segment and Error(kInvalidInput) for a
// negative penalty or min_segment < 1.
ChangePointResult pelt_segment(std::span<const double> series, double penalty,
                               std::size_t min_segment);

// ---- online detection -------------------------------------------------------

struct DetectorConfig {
  double penalty = 0.05;
  std::size_t min_segment = 2;
  std::size_t min_history = 4;  // no decision before this many points

  // Penalty and minimum segment length at which the simulation protocol's
  // detection times are reproduced; see README.
  static DetectorConfig calibrated();
};

struct Alert {
  std::size_t day = 0;       // 1-based count of observations when raised
  std::size_t boundary = 0;  // index of the first point after the shift
  double pre_mean = 0.0;
  double post_mean = 0.0;
};

// Re-segments the whole history after each observation and raises an alert
// the first time some change point separates a segment from a following
// segment with a lower mean. Once raised, the alert is kept until reset().
class OnlineDetector {
 public:
  // Throws Error(kInvalidInput) when min_history < 2 * min_segment.
  explicit OnlineDetector(DetectorConfig config = {});

  // Returns the alert on the observation that raises it, nullopt otherwise.
  std::optional<Alert> push(double value);

  const std::optional<Alert>& alert() const { return alert_; }
  std::span<const double> history() const { return history_; }
  const DetectorConfig& config() const { return config_; }
  void reset();

 private:
  DetectorConfig config_;
  std::vector<double> history_;
  std::optional<Alert> alert_;
};

// Latest deteriorating boundary of a segmentation, if any.
std::optional<Alert> deterioration(const ChangePointResult& result,
                                   std::size_t series_length);

nlohmann::json to_json(const Alert& alert);

// ---- simulation study -------------------------------------------------------

enum class DropMode { kSudden, kGradual };

std::string_view to_string(DropMode mode);
DropMode parse_drop_mode(std::string_view name);

struct DriftSimConfig {
  std::size_t n_days_before = 100;
  std::size_t n_days_after = 100;
  double base_mean = 0.85;
  double base_std = 0.025;
  double drop = 0.10;
  DropMode mode = DropMode::kSudden;
  std::size_t repetitions = 1000;
  std::uint64_t seed = 42;
};

// Scheduled mean accuracy on 1-based day `day`.
double scheduled_mean(const DriftSimConfig& config, std::size_t day);

// Daily accuracies drawn from Normal(scheduled_mean, base_std) and clipped
// to [0, 1]. The standard normal draws depend only on (seed, rep_index), so
// every cell of a study sees the same noise for a given repetition.
std::vector<double> simulate_series(const DriftSimConfig& config,
                                    std::size_t rep_index);

struct DetectionOutcome {
  bool detected = false;
  std::size_t detection_time = 0;  // days after the last pre-drop day
  double mean_accuracy_at_detection = 0.0;  // scheduled mean that day
};

// Feeds the series one day at a time, deciding from day n_days_before + 1
// onward.
DetectionOutcome detect(const DriftSimConfig& config,
                        std::span<const double> series,
                        const DetectorConfig& detector);

struct StudyCell {
  DropMode mode = DropMode::kSudden;
  double drop = 0.0;
  std::size_t repetitions = 0;
  double detection_rate = 0.0;
  std::size_t min_time = 0;
  double avg_time = 0.0;
  std::size_t max_time = 0;
  double std_time = 0.0;  // population standard deviation
  double min_mean_accuracy = 0.0;
};

StudyCell run_cell(const DriftSimConfig& config, const DetectorConfig& detector);

// Every (mode, drop) combination over `drops`, sudden first.
std::vector<StudyCell> run_simulation_study(const DriftSimConfig& base,
                                            std::span<const double> drops,
                                            const DetectorConfig& detector);

// deterioration,min,avg,max,stddev,detection_rate[,min_mean_accuracy] for
// one mode; the last column is written for gradual cells only.
void write_study_csv(std::ostream& out, std::span<const StudyCell> cells,
                     DropMode mode);

}  // namespace triage::drift
