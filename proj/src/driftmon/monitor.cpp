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
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "triage/driftmon.hpp"
#include "triage/error.hpp"
#include "triage/parallel.hpp"
#include "triage/random.hpp"

namespace triage::drift {

DetectorConfig DetectorConfig::calibrated() {
  return {.penalty = 0.0055, .min_segment = 3, .min_history = 6};
}

OnlineDetector::OnlineDetector(DetectorConfig config) : config_(config) {
  if (config_.min_segment < 1 || config_.min_history < 2 * config_.min_segment) {
    throw Error(ErrorCode::kInvalidInput,
                "min_history must be at least twice min_segment");
  }
  if (!(config_.penalty >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "penalty must be >= 0");
  }
}

std::optional<Alert> OnlineDetector::push(double value) {
  history_.push_back(value);
  if (alert_ || history_.size() < config_.min_history) return std::nullopt;
  const auto result =
      pelt_segment(history_, config_.penalty, config_.min_segment);
  alert_ = deterioration(result, history_.size());
  return alert_;
}

void OnlineDetector::reset() {
  history_.clear();
  alert_.reset();
}

std::optional<Alert> deterioration(const ChangePointResult& result,
                                   std::size_t series_length) {
  for (std::size_t k = result.change_points.size(); k-- > 0;) {
    const double before = result.segment_means[k];
    const double after = result.segment_means[k + 1];
    if (after < before) {
      return Alert{series_length, result.change_points[k], before, after};
    }
  }
  return std::nullopt;
}

nlohmann::json to_json(const Alert& alert) {
  return {{"day", alert.day},
          {"boundary", alert.boundary},
          {"pre_mean", alert.pre_mean},
          {"post_mean", alert.post_mean}};
}

std::string_view to_string(DropMode mode) {
  return mode == DropMode::kSudden ? "sudden" : "gradual";
}

DropMode parse_drop_mode(std::string_view name) {
  if (name == "sudden") return DropMode::kSudden;
  if (name == "gradual") return DropMode::kGradual;
  throw Error(ErrorCode::kInvalidInput, fmt::format("unknown mode '{}'", name));
}

double scheduled_mean(const DriftSimConfig& config, std::size_t day) {
  if (day <= config.n_days_before) return config.base_mean;
  if (config.mode == DropMode::kSudden) return config.base_mean - config.drop;
  const double progress = static_cast<double>(day - config.n_days_before) /
                          static_cast<double>(config.n_days_after);
  return config.base_mean - config.drop * progress;
}

std::vector<double> simulate_series(const DriftSimConfig& config,
                                    std::size_t rep_index) {
  if (!(config.base_std > 0.0) || !(config.drop >= 0.0) ||
      !(config.drop < config.base_mean) || config.n_days_before == 0 ||
      config.n_days_after == 0) {
    throw Error(ErrorCode::kInvalidInput, "invalid simulation configuration");
  }
  std::mt19937_64 rng(derive_seed(config.seed, rep_index));
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = config.n_days_before + config.n_days_after;
  std::vector<double> series(n);
  for (std::size_t d = 1; d <= n; ++d) {
    const double value = scheduled_mean(config, d) + config.base_std * noise(rng);
    series[d - 1] = std::clamp(value, 0.0, 1.0);
  }
  return series;
}

DetectionOutcome detect(const DriftSimConfig& config,
                        std::span<const double> series,
                        const DetectorConfig& detector) {
  DetectorConfig online = detector;
  online.min_history = std::max(detector.min_history, config.n_days_before + 1);
  OnlineDetector monitor(online);
  for (double value : series) {
    if (const auto alert = monitor.push(value)) {
      const std::size_t day = alert->day;
      return {true, day - config.n_days_before, scheduled_mean(config, day)};
    }
  }
  return {};
}

StudyCell run_cell(const DriftSimConfig& config, const DetectorConfig& detector) {
  std::vector<DetectionOutcome> outcomes(config.repetitions);
  parallel_for(config.repetitions, [&](std::size_t rep) {
    outcomes[rep] = detect(config, simulate_series(config, rep), detector);
  });

  StudyCell cell;
  cell.mode = config.mode;
  cell.drop = config.drop;
  cell.repetitions = config.repetitions;
  std::vector<double> times;
  cell.min_mean_accuracy = 1.0;
  for (const auto& o : outcomes) {
    if (!o.detected) continue;
    times.push_back(static_cast<double>(o.detection_time));
    cell.min_mean_accuracy = std::min(cell.min_mean_accuracy,
                                      o.mean_accuracy_at_detection);
  }
  if (config.repetitions > 0) {
    cell.detection_rate = static_cast<double>(times.size()) /
                          static_cast<double>(config.repetitions);
  }
  if (times.empty()) return cell;
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  cell.min_time = static_cast<std::size_t>(*lo);
  cell.max_time = static_cast<std::size_t>(*hi);
  double sum = 0.0;
  for (double t : times) sum += t;
  cell.avg_time = sum / static_cast<double>(times.size());
  double squares = 0.0;
  for (double t : times) squares += (t - cell.avg_time) * (t - cell.avg_time);
  cell.std_time = std::sqrt(squares / static_cast<double>(times.size()));
  return cell;
}

std::vector<StudyCell> run_simulation_study(const DriftSimConfig& base,
                                            std::span<const double> drops,
                                            const DetectorConfig& detector) {
  std::vector<StudyCell> cells;
  for (DropMode mode : {DropMode::kSudden, DropMode::kGradual}) {
    for (double drop : drops) {
      DriftSimConfig config = base;
      config.mode = mode;
      config.drop = drop;
      cells.push_back(run_cell(config, detector));
    }
  }
  return cells;
}

void write_study_csv(std::ostream& out, std::span<const StudyCell> cells,
                     DropMode mode) {
  const bool gradual = mode == DropMode::kGradual;
  out << "deterioration,min,avg,max,stddev,detection_rate";
  out << (gradual ? ",min_mean_accuracy\n" : "\n");
  for (const auto& c : cells) {
    if (c.mode != mode) continue;
    out << fmt::format("{:g}-point,{},{:.2f},{},{:.2f},{:.3f}",
                       std::round(c.drop * 100.0), c.min_time, c.avg_time,
                       c.max_time, c.std_time, c.detection_rate);
    if (gradual) out << fmt::format(",{:.4f}", c.min_mean_accuracy);
    out << '\n';
  }
}

}  // namespace triage::drift
