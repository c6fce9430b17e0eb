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
#include <random>

#include <fmt/format.h>

#include "codec.hpp"
#include "triage/parallel.hpp"
#include "triage/classify.hpp"
#include "triage/error.hpp"
#include "triage/random.hpp"

namespace triage::classify {

using nlohmann::json;

// Column-major copy of the stored kNN points for sparse similarity queries.
struct TrainedModel::KnnIndex {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> columns;
  std::vector<double> norms;
};

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t argmax_counts(std::span<const double> counts) {
  return detail::argmax(counts);
}

// ---- multinomial naive Bayes ------------------------------------------------

NaiveBayesParams fit_naive_bayes(std::span<const SparseVector> X,
                                 std::span<const std::uint32_t> labels,
                                 std::size_t n_classes, std::size_t dim,
                                 double alpha) {
  NaiveBayesParams p;
  std::vector<double> class_count(n_classes, 0.0);
  std::vector<double> feature_sum(n_classes * dim, 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto c = labels[i];
    class_count[c] += 1.0;
    for (const auto& e : X[i].entries()) feature_sum[c * dim + e.index] += e.weight;
  }
  p.log_prior.resize(n_classes);
  p.log_likelihood.resize(n_classes * dim);
  for (std::size_t c = 0; c < n_classes; ++c) {
    p.log_prior[c] = std::log(class_count[c] / static_cast<double>(X.size()));
    double total = 0.0;
    for (std::size_t f = 0; f < dim; ++f) total += feature_sum[c * dim + f];
    const double log_denominator =
        std::log(total + alpha * static_cast<double>(dim));
    for (std::size_t f = 0; f < dim; ++f) {
      p.log_likelihood[c * dim + f] =
          std::log(feature_sum[c * dim + f] + alpha) - log_denominator;
    }
  }
  return p;
}

std::vector<double> naive_bayes_joint(const NaiveBayesParams& p,
                                      std::size_t dim, const SparseVector& x) {
  std::vector<double> joint(p.log_prior);
  for (std::size_t c = 0; c < joint.size(); ++c) {
    joint[c] += x.dot(std::span<const double>(p.log_likelihood)
                          .subspan(c * dim, dim));
  }
  return joint;
}

// ---- calibrated linear SVC --------------------------------------------------

CalibratedLinearParams fit_calibrated_svc(std::span<const SparseVector> X,
                                          std::span<const std::uint32_t> labels,
                                          std::size_t n_classes,
                                          std::size_t dim,
                                          const FitConfig& config) {
  const auto n_folds = static_cast<std::size_t>(
      std::max(2, config.calibration_folds));
  const auto fold = detail::stratified_folds(labels, n_classes, n_folds,
                                             derive_seed(config.seed, 77));
  std::vector<double> oof(X.size() * n_classes, 0.0);
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<SparseVector> train_x;
    std::vector<std::uint32_t> train_y;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (fold[i] != f) {
        train_x.push_back(X[i]);
        train_y.push_back(labels[i]);
      }
    }
    if (train_x.empty()) continue;
    FitConfig fold_config = config;
    fold_config.seed = derive_seed(config.seed, 100 + f);
    const auto svc = detail::train_linear_svc(train_x, train_y, n_classes, dim,
                                              fold_config);
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (fold[i] != f) continue;
      const auto s = svc.scores(X[i]);
      std::copy(s.begin(), s.end(), oof.begin() + static_cast<long>(i * n_classes));
    }
  }
  CalibratedLinearParams p;
  p.sigmoids.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<double> scores(X.size());
    std::vector<int> signs(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
      scores[i] = oof[i * n_classes + c];
      signs[i] = labels[i] == c ? 1 : -1;
    }
    p.sigmoids[c] = detail::fit_platt(scores, signs);
  }
  p.svc = detail::train_linear_svc(X, labels, n_classes, dim, config);
  return p;
}

std::vector<double> calibrated_proba(const CalibratedLinearParams& p,
                                     const SparseVector& x) {
  const auto scores = p.svc.scores(x);
  std::vector<double> out(scores.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    out[c] = p.sigmoids[c](scores[c]);
    sum += out[c];
  }
  if (!(sum > 0.0)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (double& v : out) v /= sum;
  return out;
}

// ---- random forest ----------------------------------------------------------

ForestParams fit_forest(std::span<const SparseVector> X,
                        std::span<const std::uint32_t> labels,
                        std::size_t n_classes, std::size_t dim,
                        const FitConfig& config) {
  ForestParams forest;
  const auto n_trees = static_cast<std::size_t>(std::max(1, config.forest_trees));
  forest.trees.resize(n_trees);
  const auto max_features = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::sqrt(static_cast<double>(dim))));
  parallel_for(n_trees, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(config.seed, 5000 + t));
    std::uniform_int_distribution<std::uint32_t> pick(
        0, static_cast<std::uint32_t>(X.size() - 1));
    std::vector<std::uint32_t> rows(X.size());
    for (auto& r : rows) r = pick(rng);
    forest.trees[t] = detail::train_tree(
        X, labels, rows, n_classes, dim, config.tree_max_depth,
        config.tree_min_leaf, max_features, derive_seed(config.seed, 9000 + t));
  });
  return forest;
}

// ---- serialization ----------------------------------------------------------

json linear_to_json(const LinearParams& p) {
  return {{"dimension", p.dimension},
          {"weights", codec::pack<double>(p.weights)},
          {"intercepts", codec::pack<double>(p.intercepts)}};
}

LinearParams linear_from_json(const json& j) {
  LinearParams p;
  p.dimension = j.at("dimension").get<std::size_t>();
  p.weights = codec::unpack<double>(j.at("weights"));
  p.intercepts = codec::unpack<double>(j.at("intercepts"));
  if (p.weights.size() != p.dimension * p.intercepts.size()) {
    throw Error(ErrorCode::kFormatError, "linear weights have the wrong shape");
  }
  return p;
}

json tree_to_json(const TreeParams& t) {
  std::vector<std::int32_t> features, lefts, rights, leaves;
  std::vector<double> thresholds;
  for (const auto& n : t.nodes) {
    features.push_back(n.feature);
    thresholds.push_back(n.threshold);
    lefts.push_back(n.left);
    rights.push_back(n.right);
    leaves.push_back(n.leaf);
  }
  return {{"feature", codec::pack<std::int32_t>(features)},
          {"threshold", codec::pack<double>(thresholds)},
          {"left", codec::pack<std::int32_t>(lefts)},
          {"right", codec::pack<std::int32_t>(rights)},
          {"leaf", codec::pack<std::int32_t>(leaves)},
          {"distributions", codec::pack<double>(t.leaf_distributions)}};
}

TreeParams tree_from_json(const json& j, std::size_t n_classes) {
  const auto features = codec::unpack<std::int32_t>(j.at("feature"));
  const auto thresholds = codec::unpack<double>(j.at("threshold"));
  const auto lefts = codec::unpack<std::int32_t>(j.at("left"));
  const auto rights = codec::unpack<std::int32_t>(j.at("right"));
  const auto leaves = codec::unpack<std::int32_t>(j.at("leaf"));
  TreeParams t;
  t.leaf_distributions = codec::unpack<double>(j.at("distributions"));
  const std::size_t n = features.size();
  if (thresholds.size() != n || lefts.size() != n || rights.size() != n ||
      leaves.size() != n || n == 0) {
    throw Error(ErrorCode::kFormatError, "tree arrays differ in length");
  }
  const auto n_leaves = t.leaf_distributions.size() / n_classes;
  for (std::size_t i = 0; i < n; ++i) {
    TreeParams::Node node{features[i], thresholds[i], lefts[i], rights[i],
                          leaves[i]};
    const bool ok =
        node.feature < 0
            ? (node.leaf >= 0 && static_cast<std::size_t>(node.leaf) < n_leaves)
            : (node.left > static_cast<std::int32_t>(i) &&
               node.right > static_cast<std::int32_t>(i) &&
               static_cast<std::size_t>(node.left) < n &&
               static_cast<std::size_t>(node.right) < n);
    if (!ok) throw Error(ErrorCode::kFormatError, "malformed tree node");
    t.nodes.push_back(node);
  }
  return t;
}

json params_to_json(const Parameters& parameters) {
  return std::visit(
      Overloaded{
          [](const BaselineParams& p) { return json{{"majority", p.majority}}; },
          [](const NaiveBayesParams& p) {
            return json{{"log_prior", codec::pack<double>(p.log_prior)},
                        {"log_likelihood", codec::pack<double>(p.log_likelihood)}};
          },
          [](const LinearParams& p) { return linear_to_json(p); },
          [](const CalibratedLinearParams& p) {
            std::vector<double> ab;
            for (const auto& s : p.sigmoids) {
              ab.push_back(s.a);
              ab.push_back(s.b);
            }
            return json{{"svc", linear_to_json(p.svc)},
                        {"sigmoids", codec::pack<double>(ab)}};
          },
          [](const KnnParams& p) {
            return json{{"k", p.k},
                        {"points", codec::pack_rows(p.points)},
                        {"labels", codec::pack<std::uint32_t>(p.labels)}};
          },
          [](const TreeParams& p) { return tree_to_json(p); },
          [](const ForestParams& p) {
            json trees = json::array();
            for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
            return json{{"trees", trees}};
          },
      },
      parameters);
}

Parameters params_from_json(ClassifierKind kind, const json& j,
                            std::size_t n_classes, std::size_t dim) {
  switch (kind) {
    case ClassifierKind::kBaselineMajority:
      return BaselineParams{j.at("majority").get<std::uint32_t>()};
    case ClassifierKind::kMultinomialNb: {
      NaiveBayesParams p{codec::unpack<double>(j.at("log_prior")),
                         codec::unpack<double>(j.at("log_likelihood"))};
      if (p.log_prior.size() != n_classes ||
          p.log_likelihood.size() != n_classes * dim) {
        throw Error(ErrorCode::kFormatError, "naive Bayes tables have the wrong shape");
      }
      return p;
    }
    case ClassifierKind::kLogisticRegression:
    case ClassifierKind::kLinearSvc:
      return linear_from_json(j);
    case ClassifierKind::kLinearSvcCalibrated: {
      CalibratedLinearParams p;
      p.svc = linear_from_json(j.at("svc"));
      const auto ab = codec::unpack<double>(j.at("sigmoids"));
      if (ab.size() != 2 * n_classes) {
        throw Error(ErrorCode::kFormatError, "calibration table has the wrong shape");
      }
      for (std::size_t c = 0; c < n_classes; ++c) {
        p.sigmoids.push_back({ab[2 * c], ab[2 * c + 1]});
      }
      return p;
    }
    case ClassifierKind::kKnn: {
      KnnParams p;
      p.k = j.at("k").get<int>();
      p.points = codec::unpack_rows(j.at("points"));
      p.labels = codec::unpack<std::uint32_t>(j.at("labels"));
      if (p.points.size() != p.labels.size() || p.points.empty()) {
        throw Error(ErrorCode::kFormatError, "kNN points and labels differ");
      }
      return p;
    }
    case ClassifierKind::kDecisionTree:
      return tree_from_json(j, n_classes);
    case ClassifierKind::kRandomForest: {
      ForestParams p;
      for (const auto& t : j.at("trees")) p.trees.push_back(tree_from_json(t, n_classes));
      return p;
    }
  }
  throw Error(ErrorCode::kFormatError, "unknown kind");
}

void validate_training_input(std::span<const SparseVector> X,
                             std::span<const TeamId> y, std::size_t dimension) {
  if (X.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "no training samples");
  }
  if (X.size() != y.size()) {
    throw Error(ErrorCode::kShapeError,
                fmt::format("{} samples but {} labels", X.size(), y.size()));
  }
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].extent() > dimension) {
      throw Error(ErrorCode::kShapeError,
                  fmt::format("sample {} has an index beyond dimension {}", i,
                              dimension));
    }
  }
}

}  // namespace

// ---- TrainedModel -----------------------------------------------------------

TrainedModel::TrainedModel(ClassifierKind kind, std::vector<TeamId> classes,
                           std::size_t dimension, Parameters parameters)
    : kind_(kind),
      classes_(std::move(classes)),
      dimension_(dimension),
      parameters_(std::move(parameters)) {
  if (classes_.empty()) {
    throw Error(ErrorCode::kShapeError, "a model needs at least one class");
  }
  for (std::size_t i = 1; i < classes_.size(); ++i) {
    if (!(classes_[i - 1] < classes_[i])) {
      throw Error(ErrorCode::kShapeError, "classes must be sorted and distinct");
    }
  }
  if (const auto* knn = std::get_if<KnnParams>(&parameters_)) {
    auto index = std::make_shared<KnnIndex>();
    index->columns.resize(dimension_);
    index->norms.resize(knn->points.size());
    for (std::size_t r = 0; r < knn->points.size(); ++r) {
      index->norms[r] = knn->points[r].norm();
      for (const auto& e : knn->points[r].entries()) {
        if (e.index >= dimension_) {
          throw Error(ErrorCode::kShapeError, "kNN point beyond dimension");
        }
        index->columns[e.index].emplace_back(static_cast<std::uint32_t>(r),
                                             e.weight);
      }
    }
    knn_index_ = std::move(index);
  }
}

std::vector<double> TrainedModel::decision_scores(const SparseVector& x) const {
  if (const auto* p = std::get_if<LinearParams>(&parameters_)) return p->scores(x);
  if (const auto* p = std::get_if<CalibratedLinearParams>(&parameters_)) {
    return p->svc.scores(x);
  }
  throw Error(ErrorCode::kUnsupported,
              fmt::format("{} has no linear decision scores", to_string(kind_)));
}

std::size_t TrainedModel::predict_index(const SparseVector& x) const {
  switch (kind_) {
    case ClassifierKind::kBaselineMajority:
      return std::get<BaselineParams>(parameters_).majority;
    case ClassifierKind::kLinearSvc:
    case ClassifierKind::kLogisticRegression: {
      const auto s = std::get<LinearParams>(parameters_).scores(x);
      return detail::argmax(s);
    }
    case ClassifierKind::kMultinomialNb: {
      const auto joint = naive_bayes_joint(std::get<NaiveBayesParams>(parameters_),
                                           dimension_, x);
      return detail::argmax(joint);
    }
    default:
      return detail::argmax(predict_proba(x));
  }
}

std::vector<double> TrainedModel::predict_proba(const SparseVector& x) const {
  const std::size_t n_classes = classes_.size();
  switch (kind_) {
    case ClassifierKind::kBaselineMajority:
    case ClassifierKind::kLinearSvc:
      throw Error(ErrorCode::kUnsupported,
                  fmt::format("{} does not produce probabilities",
                              to_string(kind_)));
    case ClassifierKind::kMultinomialNb:
      return detail::softmax(naive_bayes_joint(
          std::get<NaiveBayesParams>(parameters_), dimension_, x));
    case ClassifierKind::kLogisticRegression:
      return detail::softmax(std::get<LinearParams>(parameters_).scores(x));
    case ClassifierKind::kLinearSvcCalibrated:
      return calibrated_proba(std::get<CalibratedLinearParams>(parameters_), x);
    case ClassifierKind::kDecisionTree:
      return detail::tree_proba(std::get<TreeParams>(parameters_), n_classes, x);
    case ClassifierKind::kRandomForest: {
      const auto& forest = std::get<ForestParams>(parameters_);
      std::vector<double> out(n_classes, 0.0);
      for (const auto& tree : forest.trees) {
        const auto p = detail::tree_proba(tree, n_classes, x);
        for (std::size_t c = 0; c < n_classes; ++c) out[c] += p[c];
      }
      for (double& v : out) v /= static_cast<double>(forest.trees.size());
      return out;
    }
    case ClassifierKind::kKnn: {
      const auto& knn = std::get<KnnParams>(parameters_);
      const std::size_t n = knn.points.size();
      std::vector<double> sim(n, 0.0);
      const double x_norm = x.norm();
      if (x_norm > 0.0) {
        for (const auto& e : x.entries()) {
          if (e.index >= dimension_) continue;
          for (const auto& [row, value] : knn_index_->columns[e.index]) {
            sim[row] += value * e.weight;
          }
        }
        for (std::size_t r = 0; r < n; ++r) {
          sim[r] = knn_index_->norms[r] > 0.0
                       ? sim[r] / (x_norm * knn_index_->norms[r])
                       : 0.0;
        }
      }
      const std::size_t k =
          std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, knn.k)));
      std::vector<std::uint32_t> order(n);
      for (std::size_t r = 0; r < n; ++r) order[r] = static_cast<std::uint32_t>(r);
      std::partial_sort(order.begin(), order.begin() + static_cast<long>(k),
                        order.end(), [&](std::uint32_t a, std::uint32_t b) {
                          return sim[a] != sim[b] ? sim[a] > sim[b] : a < b;
                        });
      constexpr double kZeroDistance = 1e-12;
      std::vector<double> votes(n_classes, 0.0);
      bool exact = false;
      for (std::size_t j = 0; j < k; ++j) {
        exact = exact || (1.0 - sim[order[j]]) <= kZeroDistance;
      }
      for (std::size_t j = 0; j < k; ++j) {
        const double distance = std::max(0.0, 1.0 - sim[order[j]]);
        if (exact) {
          if (distance <= kZeroDistance) votes[knn.labels[order[j]]] += 1.0;
        } else {
          votes[knn.labels[order[j]]] += 1.0 / distance;
        }
      }
      double total = 0.0;
      for (double v : votes) total += v;
      for (double& v : votes) v /= total;
      return votes;
    }
  }
  throw Error(ErrorCode::kUnsupported, "unknown kind");
}

std::string TrainedModel::describe() const { return std::string(to_string(kind_)); }

json TrainedModel::to_json() const {
  json classes = json::array();
  for (const auto& c : classes_) classes.push_back(c.name());
  return {{"type", "level0"},
          {"kind", std::string(to_string(kind_))},
          {"classes", classes},
          {"dimension", dimension_},
          {"params", params_to_json(parameters_)}};
}

TrainedModel TrainedModel::from_json(const json& j) {
  const auto kind = parse_kind(j.at("kind").get<std::string>());
  std::vector<TeamId> classes;
  for (const auto& c : j.at("classes")) classes.emplace_back(c.get<std::string>());
  const auto dim = j.at("dimension").get<std::size_t>();
  auto params = params_from_json(kind, j.at("params"), classes.size(), dim);
  return TrainedModel(kind, std::move(classes), dim, std::move(params));
}

// ---- fit --------------------------------------------------------------------

TrainedModel fit(ClassifierKind kind, std::span<const SparseVector> X,
                 std::span<const TeamId> y, std::size_t dimension,
                 const FitConfig& config) {
  validate_training_input(X, y, dimension);

  std::vector<TeamId> classes(y.begin(), y.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2 && kind != ClassifierKind::kBaselineMajority) {
    throw Error(ErrorCode::kDegenerateLabels,
                fmt::format("{} needs at least two classes", to_string(kind)));
  }
  std::vector<std::uint32_t> labels(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    labels[i] = static_cast<std::uint32_t>(
        std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());
  }
  const std::size_t n_classes = classes.size();

  Parameters params;
  switch (kind) {
    case ClassifierKind::kBaselineMajority: {
      std::vector<double> counts(n_classes, 0.0);
      for (auto l : labels) counts[l] += 1.0;
      params = BaselineParams{static_cast<std::uint32_t>(argmax_counts(counts))};
      break;
    }
    case ClassifierKind::kMultinomialNb:
      params = fit_naive_bayes(X, labels, n_classes, dimension, config.nb_alpha);
      break;
    case ClassifierKind::kDecisionTree: {
      std::vector<std::uint32_t> rows(X.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::uint32_t>(i);
      params = detail::train_tree(X, labels, rows, n_classes, dimension,
                                  config.tree_max_depth, config.tree_min_leaf,
                                  0, config.seed);
      break;
    }
    case ClassifierKind::kKnn:
      if (config.knn_k < 1) {
        throw Error(ErrorCode::kInvalidInput, "kNN needs k >= 1");
      }
      params = KnnParams{config.knn_k, {X.begin(), X.end()}, labels};
      break;
    case ClassifierKind::kLogisticRegression:
      params = detail::train_logistic(X, labels, n_classes, dimension,
                                      config.logistic_lambda,
                                      config.logistic_tol,
                                      config.logistic_max_iter);
      break;
    case ClassifierKind::kRandomForest:
      params = fit_forest(X, labels, n_classes, dimension, config);
      break;
    case ClassifierKind::kLinearSvc:
      params = detail::train_linear_svc(X, labels, n_classes, dimension, config);
      break;
    case ClassifierKind::kLinearSvcCalibrated:
      params = fit_calibrated_svc(X, labels, n_classes, dimension, config);
      break;
  }
  return TrainedModel(kind, std::move(classes), dimension, std::move(params));
}

}  // namespace triage::classify
