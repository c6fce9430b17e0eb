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
#include <random>

#include <fmt/format.h>

#include "triage/classify.hpp"
#include "triage/error.hpp"
#include "triage/random.hpp"

namespace triage::classify {
namespace {

constexpr ClassifierKind kAllKinds[] = {
    ClassifierKind::kBaselineMajority,  ClassifierKind::kMultinomialNb,
    ClassifierKind::kDecisionTree,      ClassifierKind::kKnn,
    ClassifierKind::kLogisticRegression, ClassifierKind::kRandomForest,
    ClassifierKind::kLinearSvc,         ClassifierKind::kLinearSvcCalibrated,
};

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kBaselineMajority: return "baseline_majority";
    case ClassifierKind::kMultinomialNb: return "multinomial_nb";
    case ClassifierKind::kDecisionTree: return "decision_tree";
    case ClassifierKind::kKnn: return "knn";
    case ClassifierKind::kLogisticRegression: return "logistic_regression";
    case ClassifierKind::kRandomForest: return "random_forest";
    case ClassifierKind::kLinearSvc: return "linear_svc";
    case ClassifierKind::kLinearSvcCalibrated: return "linear_svc_calibrated";
  }
  return "unknown";
}

ClassifierKind parse_kind(std::string_view name) {
  for (ClassifierKind kind : kAllKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidInput,
              fmt::format("unknown classifier kind '{}'", name));
}

std::span<const ClassifierKind> all_kinds() { return kAllKinds; }

bool supports_proba(ClassifierKind kind) {
  return kind != ClassifierKind::kBaselineMajority &&
         kind != ClassifierKind::kLinearSvc;
}

std::string_view to_string(EnsembleMode mode) {
  return mode == EnsembleMode::kBest ? "BEST" : "SELECTED";
}

std::vector<double> LinearParams::scores(const SparseVector& x) const {
  std::vector<double> out(intercepts);
  for (std::size_t c = 0; c < out.size(); ++c) out[c] += x.dot(row(c));
  return out;
}

double PlattSigmoid::operator()(double score) const {
  // Evaluated in the numerically safe branch for either sign.
  const double f = a * score + b;
  if (f >= 0.0) return std::exp(-f) / (1.0 + std::exp(-f));
  return 1.0 / (1.0 + std::exp(f));
}

namespace detail {

void check_composition(EnsembleMode mode, int k,
                       std::span<const ClassifierKind> kinds) {
  if (k != 3 && k != 5) {
    throw Error(ErrorCode::kInvalidInput,
                fmt::format("ensemble size must be 3 or 5, got {}", k));
  }
  const auto needed = static_cast<std::size_t>(k);
  if (mode == EnsembleMode::kSelected ? kinds.size() != needed
                                      : kinds.size() < needed) {
    throw Error(ErrorCode::kInvalidInput,
                fmt::format("{}-{} cannot be built from {} kinds",
                            to_string(mode), k, kinds.size()));
  }
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (!supports_proba(kinds[i])) {
      throw Error(ErrorCode::kInvalidInput,
                  fmt::format("{} does not produce probabilities",
                              to_string(kinds[i])));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (kinds[i] == kinds[j]) {
        throw Error(ErrorCode::kInvalidInput,
                    fmt::format("{} appears twice", to_string(kinds[i])));
      }
    }
  }
}

}  // namespace detail

ModelSpec parse_spec(std::string_view text) {
  const auto dash = text.find('-');
  const bool best = text.starts_with("BEST-");
  const bool selected = text.starts_with("SELECTED-");
  if (!best && !selected) return parse_kind(text);

  EnsembleSpec spec;
  spec.mode = best ? EnsembleMode::kBest : EnsembleMode::kSelected;
  const auto colon = text.find(':');
  const auto k_text = text.substr(dash + 1, colon == std::string_view::npos
                                                ? std::string_view::npos
                                                : colon - dash - 1);
  if (k_text == "3") {
    spec.k = 3;
  } else if (k_text == "5") {
    spec.k = 5;
  } else {
    throw Error(ErrorCode::kInvalidInput,
                fmt::format("ensemble size must be 3 or 5 in '{}'", text));
  }
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      spec.kinds.push_back(parse_kind(trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  } else if (best) {
    for (ClassifierKind kind : kAllKinds) {
      if (supports_proba(kind)) spec.kinds.push_back(kind);
    }
  } else {
    throw Error(ErrorCode::kInvalidInput,
                "SELECTED ensembles need an explicit composition");
  }
  detail::check_composition(spec.mode, spec.k, spec.kinds);
  return spec;
}

std::string to_string(const ModelSpec& spec) {
  if (const auto* kind = std::get_if<ClassifierKind>(&spec)) {
    return std::string(to_string(*kind));
  }
  const auto& ensemble = std::get<EnsembleSpec>(spec);
  std::string out = fmt::format("{}-{}:", to_string(ensemble.mode), ensemble.k);
  for (std::size_t i = 0; i < ensemble.kinds.size(); ++i) {
    if (i > 0) out += ',';
    out += to_string(ensemble.kinds[i]);
  }
  return out;
}

namespace detail {

std::vector<std::uint32_t> stratified_folds(
    std::span<const std::uint32_t> labels, std::size_t n_classes,
    std::size_t n_folds, std::uint64_t seed) {
  std::vector<std::vector<std::uint32_t>> members(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[labels[i]].push_back(static_cast<std::uint32_t>(i));
  }
  std::vector<std::uint32_t> fold(labels.size(), 0);
  std::size_t next = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    std::shuffle(members[c].begin(), members[c].end(), rng);
    for (std::uint32_t i : members[c]) {
      fold[i] = static_cast<std::uint32_t>(next % n_folds);
      ++next;
    }
  }
  return fold;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  if (out.empty()) return out;
  const double top = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace detail
}  // namespace triage::classify
