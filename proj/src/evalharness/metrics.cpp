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
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "triage/error.hpp"
#include "triage/evalharness.hpp"
#include "triage/random.hpp"

namespace triage::eval {
namespace {

std::vector<TeamId> sorted_unique(std::vector<TeamId> teams) {
  std::sort(teams.begin(), teams.end());
  teams.erase(std::unique(teams.begin(), teams.end()), teams.end());
  return teams;
}

LabeledData vectorize_with(std::span<const corpus::IssueReport> reports,
                           const text::Vocabulary& vocabulary,
                           std::span<const std::vector<std::string>> tokens,
                           std::span<const std::size_t> keep) {
  LabeledData data;
  data.vocabulary = vocabulary;
  for (std::size_t i : keep) {
    data.X.push_back(text::vectorize(tokens[i], vocabulary));
    data.y.push_back(corpus::ground_truth(reports[i]));
    data.ids.push_back(reports[i].id);
  }
  return data;
}

}  // namespace

LabeledData build_training_set(std::span<const corpus::IssueReport> reports,
                               const text::StopWords& stop_words) {
  std::vector<std::vector<std::string>> tokens(reports.size());
  std::vector<std::vector<std::string>> documents;
  std::vector<std::size_t> keep;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].status != corpus::Status::kClosed) continue;
    tokens[i] = text::preprocess(reports[i], stop_words);
    if (tokens[i].empty()) {
      ++skipped;
      continue;
    }
    documents.push_back(tokens[i]);
    keep.push_back(i);
  }
  auto vocabulary = text::Vocabulary::build(documents);
  auto data = vectorize_with(reports, vocabulary, tokens, keep);
  data.skipped_empty = skipped;
  return data;
}

LabeledData vectorize_closed(std::span<const corpus::IssueReport> reports,
                             const text::Vocabulary& vocabulary,
                             const text::StopWords& stop_words) {
  std::vector<std::vector<std::string>> tokens(reports.size());
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].status != corpus::Status::kClosed) continue;
    tokens[i] = text::preprocess(reports[i], stop_words);
    keep.push_back(i);
  }
  return vectorize_with(reports, vocabulary, tokens, keep);
}

MetricsReport compute_metrics(std::span<const TeamId> y_true,
                              std::span<const TeamId> y_pred,
                              std::span<const TeamId> class_set) {
  if (y_true.empty()) {
    throw Error(ErrorCode::kEmptyEvaluation, "nothing to evaluate");
  }
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::kShapeError,
                fmt::format("{} true labels but {} predictions", y_true.size(),
                            y_pred.size()));
  }
  std::vector<TeamId> all(class_set.begin(), class_set.end());
  all.insert(all.end(), y_true.begin(), y_true.end());
  all.insert(all.end(), y_pred.begin(), y_pred.end());
  const auto classes = sorted_unique(std::move(all));
  const auto index_of = [&](const TeamId& t) {
    return static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), t) - classes.begin());
  };

  std::vector<std::size_t> true_positive(classes.size(), 0);
  std::vector<std::size_t> predicted(classes.size(), 0);
  std::vector<std::size_t> support(classes.size(), 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const auto t = index_of(y_true[i]);
    const auto p = index_of(y_pred[i]);
    ++support[t];
    ++predicted[p];
    if (t == p) {
      ++true_positive[t];
      ++correct;
    }
  }

  MetricsReport report;
  const auto n = static_cast<double>(y_true.size());
  report.accuracy = static_cast<double>(correct) / n;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    ClassMetrics m{classes[c], 0.0, 0.0, 0.0, support[c]};
    const auto tp = static_cast<double>(true_positive[c]);
    if (predicted[c] > 0) m.precision = tp / static_cast<double>(predicted[c]);
    if (support[c] > 0) m.recall = tp / static_cast<double>(support[c]);
    if (m.precision + m.recall > 0.0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    const auto weight = static_cast<double>(support[c]);
    report.weighted_precision += weight * m.precision;
    report.weighted_f1 += weight * m.f1;
    report.per_class.push_back(std::move(m));
  }
  report.weighted_precision /= n;
  report.weighted_f1 /= n;
  // Support-weighted recall telescopes to correct / n; computing it that way
  // keeps it bit-identical to accuracy.
  report.weighted_recall = report.accuracy;
  return report;
}

std::string CvResult::format() const {
  return fmt::format("{:.2f} (+/- {:.2f})", mean, stddev);
}

CvResult kfold_cv(const ModelSpec& spec, std::span<const SparseVector> X,
                  std::span<const TeamId> y, std::size_t dimension, int k_folds,
                  const classify::FitConfig& config) {
  if (k_folds < 2) {
    throw Error(ErrorCode::kInvalidInput, "cross validation needs k >= 2");
  }
  if (X.size() != y.size()) {
    throw Error(ErrorCode::kShapeError, "samples and labels differ in length");
  }
  const auto k = static_cast<std::size_t>(k_folds);
  std::map<TeamId, std::size_t> counts;
  for (const auto& t : y) ++counts[t];

  CvResult result;
  std::vector<TeamId> kept_classes;
  for (const auto& [team, count] : counts) {
    if (count < k) {
      result.excluded_classes.push_back(team);
    } else {
      kept_classes.push_back(team);
    }
  }
  std::vector<std::size_t> rows;
  std::vector<std::uint32_t> labels;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto it = std::lower_bound(kept_classes.begin(), kept_classes.end(), y[i]);
    if (it == kept_classes.end() || !(*it == y[i])) continue;
    rows.push_back(i);
    labels.push_back(static_cast<std::uint32_t>(it - kept_classes.begin()));
  }
  result.n_samples = rows.size();
  if (rows.size() < k || kept_classes.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                fmt::format("{}-fold cross validation needs at least {} samples "
                            "in two or more classes with {} members each",
                            k, k, k));
  }

  const auto fold = classify::detail::stratified_folds(
      labels, kept_classes.size(), k, derive_seed(config.seed, 4242));
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<SparseVector> train_x;
    std::vector<TeamId> train_y;
    std::vector<std::size_t> test;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (fold[j] == f) {
        test.push_back(rows[j]);
      } else {
        train_x.push_back(X[rows[j]]);
        train_y.push_back(y[rows[j]]);
      }
    }
    classify::FitConfig fold_config = config;
    fold_config.seed = derive_seed(config.seed, 300 + f);
    const auto model = classify::fit_spec(spec, train_x, train_y, dimension,
                                          fold_config);
    std::size_t correct = 0;
    for (std::size_t i : test) correct += model->predict(X[i]) == y[i] ? 1 : 0;
    result.fold_accuracies.push_back(static_cast<double>(correct) /
                                     static_cast<double>(test.size()));
  }
  double sum = 0.0;
  for (double a : result.fold_accuracies) sum += a;
  result.mean = sum / static_cast<double>(k);
  double squares = 0.0;
  for (double a : result.fold_accuracies) {
    squares += (a - result.mean) * (a - result.mean);
  }
  result.stddev = std::sqrt(squares / static_cast<double>(k));
  return result;
}

Split stratified_split(std::span<const TeamId> y, double test_fraction,
                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "test fraction must be in (0, 1)");
  }
  std::map<TeamId, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
  Split split;
  std::size_t c = 0;
  for (auto& [team, rows] : members) {
    std::mt19937_64 rng(derive_seed(seed, c++));
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(rows.size())));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      (j < n_test ? split.test : split.train).push_back(rows[j]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

HoldoutReport evaluate_holdout(const ModelSpec& spec,
                               std::span<const corpus::IssueReport> train,
                               std::span<const corpus::IssueReport> test,
                               const text::StopWords& stop_words, int k_folds,
                               const classify::FitConfig& config) {
  HoldoutReport report;
  report.model = classify::to_string(spec);
  const auto train_data = build_training_set(train, stop_words);
  const auto dim = train_data.vocabulary.size();
  report.cv = kfold_cv(spec, train_data.X, train_data.y, dim, k_folds, config);

  const auto start = std::chrono::steady_clock::now();
  const auto model = classify::fit_spec(spec, train_data.X, train_data.y, dim,
                                        config);
  const auto elapsed = std::chrono::steady_clock::now() - start;

  const auto test_data = vectorize_closed(test, train_data.vocabulary, stop_words);
  std::vector<TeamId> predictions;
  predictions.reserve(test_data.X.size());
  for (const auto& x : test_data.X) predictions.push_back(model->predict(x));
  report.test = compute_metrics(test_data.y, predictions, model->classes());
  report.test.training_time = elapsed;
  report.n_train = train_data.X.size();
  report.n_test = test_data.X.size();
  return report;
}

void write_holdout_table(std::ostream& out,
                         std::span<const HoldoutReport> reports) {
  out << fmt::format("{:<60} {:>17} {:>6} {:>6} {:>6} {:>6} {:>10}\n", "model",
                     "cv accuracy", "A", "P", "R", "F", "train s");
  for (const auto& r : reports) {
    out << fmt::format("{:<60} {:>17} {:>6.2f} {:>6.2f} {:>6.2f} {:>6.2f} "
                       "{:>10.3f}\n",
                       r.model, r.cv.format(), r.test.accuracy,
                       r.test.weighted_precision, r.test.weighted_recall,
                       r.test.weighted_f1, r.test.training_time.count());
  }
}

}  // namespace triage::eval
