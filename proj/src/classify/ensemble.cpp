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
#include <numeric>

#include <fmt/format.h>

#include "codec.hpp"
#include "triage/classify.hpp"
#include "triage/error.hpp"
#include "triage/random.hpp"

namespace triage::classify {

using nlohmann::json;

namespace {

SparseVector dense_to_sparse(std::span<const double> values) {
  std::vector<text::Entry> entries;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) {
      entries.push_back({static_cast<std::uint32_t>(i), values[i]});
    }
  }
  return SparseVector(std::move(entries));
}

json linear_json(const LinearParams& p) {
  return {{"dimension", p.dimension},
          {"weights", codec::pack<double>(p.weights)},
          {"intercepts", codec::pack<double>(p.intercepts)}};
}

}  // namespace

EnsembleModel::EnsembleModel(EnsembleMode mode, std::vector<TrainedModel> level0,
                             LinearParams level1)
    : mode_(mode), level0_(std::move(level0)), level1_(std::move(level1)) {
  if (level0_.empty()) {
    throw Error(ErrorCode::kShapeError, "an ensemble needs level-0 models");
  }
  const auto classes = level0_.front().classes();
  for (const auto& m : level0_) {
    if (!m.supports_proba() ||
        !std::equal(classes.begin(), classes.end(), m.classes().begin(),
                    m.classes().end()) ||
        m.dimension() != level0_.front().dimension()) {
      throw Error(ErrorCode::kShapeError,
                  "level-0 models disagree on classes or dimension");
    }
  }
  if (level1_.intercepts.size() != classes.size() ||
      level1_.dimension != classes.size() * level0_.size() ||
      level1_.weights.size() != level1_.dimension * classes.size()) {
    throw Error(ErrorCode::kShapeError, "level-1 weights have the wrong shape");
  }
}

SparseVector EnsembleModel::meta_features(const SparseVector& x) const {
  std::vector<double> features;
  features.reserve(level1_.dimension);
  for (const auto& m : level0_) {
    const auto p = m.predict_proba(x);
    features.insert(features.end(), p.begin(), p.end());
  }
  return dense_to_sparse(features);
}

std::vector<double> EnsembleModel::predict_proba(const SparseVector& x) const {
  return detail::softmax(level1_.scores(meta_features(x)));
}

std::size_t EnsembleModel::predict_index(const SparseVector& x) const {
  return detail::argmax(level1_.scores(meta_features(x)));
}

std::string EnsembleModel::describe() const {
  std::string out = fmt::format("{}-{}:", to_string(mode_), level0_.size());
  for (std::size_t i = 0; i < level0_.size(); ++i) {
    if (i > 0) out += ',';
    out += to_string(level0_[i].kind());
  }
  return out;
}

json EnsembleModel::to_json() const {
  json level0 = json::array();
  for (const auto& m : level0_) level0.push_back(m.to_json());
  return {{"type", "ensemble"},
          {"mode", std::string(to_string(mode_))},
          {"level0", level0},
          {"level1", linear_json(level1_)}};
}

EnsembleModel EnsembleModel::from_json(const json& j) {
  const auto mode_name = j.at("mode").get<std::string>();
  EnsembleMode mode;
  if (mode_name == "BEST") {
    mode = EnsembleMode::kBest;
  } else if (mode_name == "SELECTED") {
    mode = EnsembleMode::kSelected;
  } else {
    throw Error(ErrorCode::kFormatError,
                fmt::format("unknown ensemble mode '{}'", mode_name));
  }
  std::vector<TrainedModel> level0;
  for (const auto& m : j.at("level0")) level0.push_back(TrainedModel::from_json(m));
  const auto& l1 = j.at("level1");
  LinearParams level1;
  level1.dimension = l1.at("dimension").get<std::size_t>();
  level1.weights = codec::unpack<double>(l1.at("weights"));
  level1.intercepts = codec::unpack<double>(l1.at("intercepts"));
  return EnsembleModel(mode, std::move(level0), std::move(level1));
}

EnsembleModel fit_stacked(EnsembleMode mode, int k,
                          std::span<const ClassifierKind> kinds,
                          std::span<const SparseVector> X,
                          std::span<const TeamId> y, std::size_t dimension,
                          const FitConfig& config) {
  detail::check_composition(mode, k, kinds);
  if (X.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no training samples");
  if (X.size() != y.size()) {
    throw Error(ErrorCode::kShapeError,
                fmt::format("{} samples but {} labels", X.size(), y.size()));
  }

  std::vector<TeamId> classes(y.begin(), y.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) {
    throw Error(ErrorCode::kDegenerateLabels, "stacking needs two classes");
  }
  const std::size_t n_classes = classes.size();
  std::vector<std::uint32_t> labels(y.size());
  std::vector<std::size_t> support(n_classes, 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    labels[i] = static_cast<std::uint32_t>(
        std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());
    ++support[labels[i]];
  }
  const auto n_folds = static_cast<std::size_t>(std::max(2, config.stacking_folds));
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (support[c] < 2 * n_folds) {
      throw Error(ErrorCode::kInsufficientData,
                  fmt::format("class '{}' has {} members; stacking with {} "
                              "folds needs at least {}",
                              classes[c].name(), support[c], n_folds,
                              2 * n_folds));
    }
  }
  const auto fold = detail::stratified_folds(labels, n_classes, n_folds,
                                             derive_seed(config.seed, 31));

  // Out-of-fold probabilities for every candidate: oof[kind][sample][class].
  std::vector<std::vector<double>> oof(
      kinds.size(), std::vector<double>(X.size() * n_classes, 0.0));
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<SparseVector> train_x;
    std::vector<TeamId> train_y;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (fold[i] != f) {
        train_x.push_back(X[i]);
        train_y.push_back(y[i]);
      }
    }
    FitConfig fold_config = config;
    fold_config.seed = derive_seed(config.seed, 200 + f);
    for (std::size_t m = 0; m < kinds.size(); ++m) {
      const auto model = fit(kinds[m], train_x, train_y, dimension, fold_config);
      for (std::size_t i = 0; i < X.size(); ++i) {
        if (fold[i] != f) continue;
        const auto p = model.predict_proba(X[i]);
        std::copy(p.begin(), p.end(),
                  oof[m].begin() + static_cast<long>(i * n_classes));
      }
    }
  }

  std::vector<std::size_t> chosen(kinds.size());
  std::iota(chosen.begin(), chosen.end(), 0);
  if (mode == EnsembleMode::kBest) {
    std::vector<std::size_t> correct(kinds.size(), 0);
    for (std::size_t m = 0; m < kinds.size(); ++m) {
      for (std::size_t i = 0; i < X.size(); ++i) {
        const std::span<const double> p(oof[m].data() + i * n_classes, n_classes);
        if (detail::argmax(p) == labels[i]) ++correct[m];
      }
    }
    std::stable_sort(chosen.begin(), chosen.end(),
                     [&](std::size_t a, std::size_t b) {
                       return correct[a] > correct[b];
                     });
    chosen.resize(static_cast<std::size_t>(k));
  }

  std::vector<SparseVector> meta(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    std::vector<double> row;
    row.reserve(chosen.size() * n_classes);
    for (std::size_t m : chosen) {
      row.insert(row.end(), oof[m].begin() + static_cast<long>(i * n_classes),
                 oof[m].begin() + static_cast<long>((i + 1) * n_classes));
    }
    meta[i] = dense_to_sparse(row);
  }
  auto level1 = detail::train_logistic(meta, labels, n_classes,
                                       chosen.size() * n_classes,
                                       config.logistic_lambda,
                                       config.logistic_tol,
                                       config.logistic_max_iter);

  std::vector<TrainedModel> level0;
  for (std::size_t m : chosen) {
    level0.push_back(fit(kinds[m], X, y, dimension, config));
  }
  return EnsembleModel(mode, std::move(level0), std::move(level1));
}

std::shared_ptr<const Predictor> fit_spec(const ModelSpec& spec,
                                          std::span<const SparseVector> X,
                                          std::span<const TeamId> y,
                                          std::size_t dimension,
                                          const FitConfig& config) {
  if (const auto* kind = std::get_if<ClassifierKind>(&spec)) {
    return std::make_shared<TrainedModel>(fit(*kind, X, y, dimension, config));
  }
  const auto& e = std::get<EnsembleSpec>(spec);
  return std::make_shared<EnsembleModel>(
      fit_stacked(e.mode, e.k, e.kinds, X, y, dimension, config));
}

std::shared_ptr<const Predictor> predictor_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "level0") {
    return std::make_shared<TrainedModel>(TrainedModel::from_json(j));
  }
  if (type == "ensemble") {
    return std::make_shared<EnsembleModel>(EnsembleModel::from_json(j));
  }
  throw Error(ErrorCode::kFormatError, fmt::format("unknown model type '{}'", type));
}

}  // namespace triage::classify
