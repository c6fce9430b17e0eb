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

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "triage/classify.hpp"
#include "triage/corpus.hpp"
#include "triage/textpipe.hpp"

namespace triage::eval {

using classify::ModelSpec;
using text::SparseVector;

// ---- datasets ---------------------------------------------------------------

// Closed reports turned into training vectors. Reports whose text is empty
// after preprocessing are left out and counted in `skipped_empty`.
struct LabeledData {
  text::Vocabulary vocabulary;
  std::vector<SparseVector> X;
  std::vector<TeamId> y;
  std::vector<std::string> ids;
  std::size_t skipped_empty = 0;
};

// Builds the vocabulary from `reports` (closed ones only) and vectorizes
// them. Throws Error(kEmptyTrainingSet) when nothing usable remains.
LabeledData build_training_set(std::span<const corpus::IssueReport> reports,
                               const text::StopWords& stop_words);

// Vectorizes closed reports against an existing vocabulary. Empty vectors
// are kept: a model still has to assign those reports.
LabeledData vectorize_closed(std::span<const corpus::IssueReport> reports,
                             const text::Vocabulary& vocabulary,
                             const text::StopWords& stop_words);

// ---- metrics ----------------------------------------------------------------

struct ClassMetrics {
  TeamId team;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // occurrences in y_true
};

struct MetricsReport {
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::vector<ClassMetrics> per_class;  // sorted by team
  std::chrono::duration<double> training_time{0.0};
};

// Per-class precision and recall from the confusion matrix (0 when the
// denominator is 0), f1 as their harmonic mean (0 when both are 0), and
// aggregates weighted by true-class support. The class table covers
// `class_set` plus every label seen in either sequence.
// Throws Error(kEmptyEvaluation) for empty input and Error(kShapeError)
// when the lengths differ.
MetricsReport compute_metrics(std::span<const TeamId> y_true,
                              std::span<const TeamId> y_pred,
                              std::span<const TeamId> class_set = {});

// ---- cross validation -------------------------------------------------------

struct CvResult {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation across folds
  std::vector<TeamId> excluded_classes;
  std::size_t n_samples = 0;  // after exclusions

  // "0.85 (+/- 0.02)".
  std::string format() const;
};

// Stratified k-fold accuracy. Classes with fewer than k_folds members are
// excluded and listed in the result. Throws Error(kInsufficientData) when
// fewer than k_folds samples (or fewer than two classes) remain.
CvResult kfold_cv(const ModelSpec& spec, std::span<const SparseVector> X,
                  std::span<const TeamId> y, std::size_t dimension,
                  int k_folds = 10, const classify::FitConfig& config = {});

// Indices of a stratified split: each class's members are shuffled with
// `seed` and the first round(test_fraction * n_c) go to the test side.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
Split stratified_split(std::span<const TeamId> y, double test_fraction,
                       std::uint64_t seed);

// Held-out evaluation of one spec: the vocabulary is learned from the
// training side only.
struct HoldoutReport {
  std::string model;
  CvResult cv;
  MetricsReport test;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};
HoldoutReport evaluate_holdout(const ModelSpec& spec,
                               std::span<const corpus::IssueReport> train,
                               std::span<const corpus::IssueReport> test,
                               const text::StopWords& stop_words,
                               int k_folds = 10,
                               const classify::FitConfig& config = {});

// Table-style text rendering, one row per evaluated model.
void write_holdout_table(std::ostream& out,
                         std::span<const HoldoutReport> reports);

// ---- window studies ---------------------------------------------------------

enum class Protocol { kSliding, kCumulative };

std::string_view to_string(Protocol protocol);
Protocol parse_protocol(std::string_view name);

struct WindowResult {
  Month test_month;
  int delta = 0;
  Protocol protocol = Protocol::kSliding;
  double accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct WindowStudyConfig {
  int max_delta = 12;
  classify::FitConfig fit;
};

// Every feasible (test month, delta) cell over the calendar months spanned
// by the closed reports. Sliding trains on the single month delta back;
// cumulative on all months 1..delta back. The vocabulary is rebuilt for each
// training set. Cells whose training set is empty or single-class, or whose
// test month is empty, are not feasible. Results are ordered by test month,
// then delta. Throws Error(kEmptyStudy) when no cell is feasible.
std::vector<WindowResult> window_study(
    std::span<const corpus::IssueReport> reports, Protocol protocol,
    const ModelSpec& spec, const text::StopWords& stop_words,
    const WindowStudyConfig& config = {});

// test_month,protocol,delta,accuracy
void write_window_csv(std::ostream& out, std::span<const WindowResult> results);

struct DeltaSummary {
  int delta = 0;
  double mean_accuracy = 0.0;
  std::size_t cells = 0;
};
// Mean accuracy per delta, ascending delta.
std::vector<DeltaSummary> aggregate_by_delta(
    std::span<const WindowResult> results);
// delta,mean_accuracy,cells
void write_delta_csv(std::ostream& out, std::span<const DeltaSummary> summary);

// Ordinary least squares of y on x with a two-sided p-value for the slope.
struct LinearTrend {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};
// Throws Error(kInsufficientData) for fewer than 3 points or constant x.
LinearTrend fit_trend(std::span<const double> x, std::span<const double> y);
LinearTrend accuracy_trend(std::span<const WindowResult> results);

// ---- deployment figures -----------------------------------------------------

struct AssignmentOutcome {
  Timestamp opened_at;
  TeamId predicted;
  TeamId actual;
};

struct DailyAccuracy {
  Day day;
  double accuracy = 0.0;
  std::size_t n_reports = 0;

  friend bool operator==(const DailyAccuracy&, const DailyAccuracy&) = default;
};

using AccuracySeries = std::vector<DailyAccuracy>;

// Groups outcomes by the UTC day the report was opened. Days without
// reports are absent; days are strictly increasing.
AccuracySeries daily_accuracy(std::span<const AssignmentOutcome> outcomes);

struct SolutionTimes {
  double mean_days_before = 0.0;
  double mean_days_after = 0.0;
  std::size_t n_before = 0;
  std::size_t n_after = 0;
};

// Mean open-to-close time of closed reports opened within `window_months`
// before the deployment day and within `window_months` from it onward.
// Throws Error(kOneSidedData) when either side has no closed reports.
SolutionTimes solution_time_report(std::span<const corpus::IssueReport> reports,
                                   Day deployment, int window_months = 2);

// Person-months saved per year when `reports_per_month` manual assignments
// of `seconds_per_assignment` each are automated; a person-month is 160
// hours. Throws Error(kInvalidInput) for negative counts or nonpositive
// seconds.
double effort_report(double reports_per_month,
                     double seconds_per_assignment = 30.0);

}  // namespace triage::eval
