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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "triage/team.hpp"
#include "triage/textpipe.hpp"

namespace triage::classify {

using text::SparseVector;

enum class ClassifierKind {
  kBaselineMajority,
  kMultinomialNb,
  kDecisionTree,
  kKnn,
  kLogisticRegression,
  kRandomForest,
  kLinearSvc,
  kLinearSvcCalibrated,
};

std::string_view to_string(ClassifierKind kind);
// Accepts the snake_case names printed by to_string.
ClassifierKind parse_kind(std::string_view name);
std::span<const ClassifierKind> all_kinds();
// Every kind except baseline_majority and linear_svc.
bool supports_proba(ClassifierKind kind);

struct FitConfig {
  std::uint64_t seed = 42;

  // linear_svc: L2-regularized hinge loss, dual coordinate descent.
  double svc_c = 1.0;
  double svc_tol = 1e-4;
  int svc_max_epochs = 1000;
  double svc_bias = 1.0;  // value of the constant feature carrying the intercept
  int calibration_folds = 3;

  double nb_alpha = 1.0;

  int knn_k = 5;

  int tree_max_depth = 50;
  int tree_min_leaf = 2;
  int forest_trees = 100;

  // Multinomial logistic regression, also used as the stacking meta-learner.
  double logistic_lambda = 1.0;
  double logistic_tol = 1e-6;
  int logistic_max_iter = 2000;

  int stacking_folds = 5;
};

// Per-class weight rows (row-major, classes x dimension) and intercepts.
struct LinearParams {
  std::size_t dimension = 0;
  std::vector<double> weights;
  std::vector<double> intercepts;

  std::span<const double> row(std::size_t c) const {
    return std::span<const double>(weights).subspan(c * dimension, dimension);
  }
  std::vector<double> scores(const SparseVector& x) const;
};

// P(positive | score) = 1 / (1 + exp(a * score + b)).
struct PlattSigmoid {
  double a = 0.0;
  double b = 0.0;

  double operator()(double score) const;
};

struct BaselineParams {
  std::uint32_t majority = 0;
};

struct NaiveBayesParams {
  std::vector<double> log_prior;       // per class
  std::vector<double> log_likelihood;  // classes x dimension
};

struct CalibratedLinearParams {
  LinearParams svc;
  std::vector<PlattSigmoid> sigmoids;  // per class
};

struct KnnParams {
  int k = 5;
  std::vector<SparseVector> points;
  std::vector<std::uint32_t> labels;
};

// Flattened CART tree. Internal nodes send x[feature] <= threshold left.
struct TreeParams {
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t leaf = -1;  // offset / n_classes into leaf_distributions
  };
  std::vector<Node> nodes;
  std::vector<double> leaf_distributions;  // leaves x classes
};

struct ForestParams {
  std::vector<TreeParams> trees;
};

using Parameters =
    std::variant<BaselineParams, NaiveBayesParams, LinearParams,
                 CalibratedLinearParams, KnnParams, TreeParams, ForestParams>;

// Anything that maps a tf-idf vector to one of an ordered list of teams.
// Implementations are immutable after construction and safe to share
// across threads.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual std::span<const TeamId> classes() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual bool supports_proba() const = 0;
  // Index into classes(); ties go to the lowest index.
  virtual std::size_t predict_index(const SparseVector& x) const = 0;
  // One probability per class. Throws Error(kUnsupported) when
  // supports_proba() is false.
  virtual std::vector<double> predict_proba(const SparseVector& x) const = 0;
  virtual std::string describe() const = 0;
  virtual nlohmann::json to_json() const = 0;

  const TeamId& predict(const SparseVector& x) const {
    return classes()[predict_index(x)];
  }
};

class TrainedModel final : public Predictor {
 public:
  TrainedModel(ClassifierKind kind, std::vector<TeamId> classes,
               std::size_t dimension, Parameters parameters);

  ClassifierKind kind() const { return kind_; }
  const Parameters& parameters() const { return parameters_; }

  std::span<const TeamId> classes() const override { return classes_; }
  std::size_t dimension() const override { return dimension_; }
  bool supports_proba() const override { return classify::supports_proba(kind_); }
  std::size_t predict_index(const SparseVector& x) const override;
  std::vector<double> predict_proba(const SparseVector& x) const override;
  std::string describe() const override;
  nlohmann::json to_json() const override;

  // Raw per-class scores for linear kinds (w_c . x + b_c). Throws
  // Error(kUnsupported) for other kinds.
  std::vector<double> decision_scores(const SparseVector& x) const;

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  struct KnnIndex;

  ClassifierKind kind_;
  std::vector<TeamId> classes_;
  std::size_t dimension_;
  Parameters parameters_;
  std::shared_ptr<const KnnIndex> knn_index_;
};

// Fits one level-0 classifier. Classes are the distinct labels in sorted
// order. Errors: empty input (kEmptyTrainingSet), |X| != |y| or an index
// outside [0, dimension) (kShapeError), a single class for any kind other
// than baseline_majority (kDegenerateLabels).
TrainedModel fit(ClassifierKind kind, std::span<const SparseVector> X,
                 std::span<const TeamId> y, std::size_t dimension,
                 const FitConfig& config = {});

enum class EnsembleMode { kBest, kSelected };

std::string_view to_string(EnsembleMode mode);

// Stacked generalization: level-0 probability vectors concatenated in
// level-0 order, each in class order, feed a multinomial logistic
// regression.
class EnsembleModel final : public Predictor {
 public:
  EnsembleModel(EnsembleMode mode, std::vector<TrainedModel> level0,
                LinearParams level1);

  EnsembleMode mode() const { return mode_; }
  std::size_t k() const { return level0_.size(); }
  std::span<const TrainedModel> level0() const { return level0_; }
  const LinearParams& level1() const { return level1_; }

  std::span<const TeamId> classes() const override {
    return level0_.front().classes();
  }
  std::size_t dimension() const override { return level0_.front().dimension(); }
  bool supports_proba() const override { return true; }
  std::size_t predict_index(const SparseVector& x) const override;
  std::vector<double> predict_proba(const SparseVector& x) const override;
  std::string describe() const override;
  nlohmann::json to_json() const override;

  SparseVector meta_features(const SparseVector& x) const;

  static EnsembleModel from_json(const nlohmann::json& j);

 private:
  EnsembleMode mode_;
  std::vector<TrainedModel> level0_;
  LinearParams level1_;
};

// SELECTED: `kinds` is the exact composition (|kinds| == k). BEST: `kinds`
// is the candidate pool, ranked by internal cross-validated accuracy (ties
// keep pool order) and the top k kept. Level-1 features are out-of-fold
// probabilities from a stratified split with config.stacking_folds folds.
// Errors: k outside {3, 5}, repeated or probability-incapable kinds
// (kInvalidInput); a class with fewer than 2 members per fold
// (kInsufficientData).
EnsembleModel fit_stacked(EnsembleMode mode, int k,
                          std::span<const ClassifierKind> kinds,
                          std::span<const SparseVector> X,
                          std::span<const TeamId> y, std::size_t dimension,
                          const FitConfig& config = {});

struct EnsembleSpec {
  EnsembleMode mode = EnsembleMode::kSelected;
  int k = 3;
  std::vector<ClassifierKind> kinds;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

// What to train: a single level-0 kind or a stacked ensemble.
using ModelSpec = std::variant<ClassifierKind, EnsembleSpec>;

// "linear_svc", "SELECTED-3:linear_svc_calibrated,knn,multinomial_nb",
// "BEST-5" (pool = every probability-capable kind) or
// "BEST-3:knn,multinomial_nb,...".
ModelSpec parse_spec(std::string_view text);
std::string to_string(const ModelSpec& spec);

std::shared_ptr<const Predictor> fit_spec(const ModelSpec& spec,
                                          std::span<const SparseVector> X,
                                          std::span<const TeamId> y,
                                          std::size_t dimension,
                                          const FitConfig& config = {});

std::shared_ptr<const Predictor> predictor_from_json(const nlohmann::json& j);

// Building blocks exposed for tests and for the stacking / calibration
// code. Labels are class indices in [0, n_classes).
namespace detail {

LinearParams train_linear_svc(std::span<const SparseVector> X,
                              std::span<const std::uint32_t> labels,
                              std::size_t n_classes, std::size_t dimension,
                              const FitConfig& config);

// Binary dual coordinate descent for one hinge-loss subproblem; `signs` are
// +1 / -1. Returns weights with the intercept appended (dimension + 1).
std::vector<double> solve_hinge_dual(std::span<const SparseVector> X,
                                     std::span<const int> signs,
                                     std::size_t dimension, double c,
                                     double bias, double tol, int max_epochs,
                                     std::uint64_t seed);

PlattSigmoid fit_platt(std::span<const double> scores,
                       std::span<const int> signs);

// Sum of per-sample softmax negative log-likelihoods plus
// (lambda / 2) * ||W||^2 (intercepts unpenalized). When `gradient` is
// non-null it receives dL/dW (row-major) followed by dL/db.
double logistic_objective(const LinearParams& params,
                          std::span<const SparseVector> X,
                          std::span<const std::uint32_t> labels, double lambda,
                          std::vector<double>* gradient);

LinearParams train_logistic(std::span<const SparseVector> X,
                            std::span<const std::uint32_t> labels,
                            std::size_t n_classes, std::size_t dimension,
                            double lambda, double tol, int max_iter);

TreeParams train_tree(std::span<const SparseVector> X,
                      std::span<const std::uint32_t> labels,
                      std::span<const std::uint32_t> sample_rows,
                      std::size_t n_classes, std::size_t dimension,
                      int max_depth, int min_leaf, std::size_t max_features,
                      std::uint64_t seed);

std::vector<double> tree_proba(const TreeParams& tree, std::size_t n_classes,
                               const SparseVector& x);

// Stratified assignment of samples to folds: each class's members, shuffled
// with `seed`, are dealt round-robin. Returns the fold of every sample.
std::vector<std::uint32_t> stratified_folds(
    std::span<const std::uint32_t> labels, std::size_t n_classes,
    std::size_t n_folds, std::uint64_t seed);

std::vector<double> softmax(std::span<const double> scores);

// Throws Error(kInvalidInput) unless `kinds` can form a k-member ensemble:
// k in {3, 5}, exactly k kinds for SELECTED and at least k for BEST, all
// distinct and probability-capable.
void check_composition(EnsembleMode mode, int k,
                       std::span<const ClassifierKind> kinds);

// Index of the maximum; the first one wins ties.
std::size_t argmax(std::span<const double> values);

}  // namespace detail

}  // namespace triage::classify
