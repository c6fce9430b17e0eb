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

// Local surrogate explanations: perturb the report by dropping words,
// score every perturbation with the model and fit a small weighted linear
// model on word presence.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_set>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "triage/error.hpp"
#include "triage/explain.hpp"

namespace triage::explain {
namespace {

struct RidgeFit {
  std::vector<double> coefficients;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Weighted ridge regression with an unpenalized intercept, solved on
// weight-centered data.
RidgeFit weighted_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, double lambda) {
  const double total = w.sum();
  const Eigen::RowVectorXd x_mean = (w.transpose() * X) / total;
  const double y_mean = w.dot(y) / total;
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd gram = Xc.transpose() * w.asDiagonal() * Xc;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd beta =
      gram.ldlt().solve(Xc.transpose() * (w.array() * yc.array()).matrix());

  RidgeFit fit;
  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  fit.intercept = y_mean - x_mean.dot(beta);
  const Eigen::VectorXd residual = yc - Xc * beta;
  const double sse = w.dot(residual.cwiseProduct(residual));
  const double sst = w.dot(yc.cwiseProduct(yc));
  fit.r_squared = sst > 0.0 ? std::clamp(1.0 - sse / sst, 0.0, 1.0)
                            : (sse > 0.0 ? 0.0 : 1.0);
  return fit;
}

void require_proba(const classify::Predictor& model) {
  if (!model.supports_proba()) {
    throw Error(ErrorCode::kUnsupported,
                fmt::format("{} does not produce probabilities", model.describe()));
  }
}

}  // namespace

std::vector<std::string> distinct_tokens(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : tokens) {
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

bool enumerates_subsets(std::size_t n_distinct, const ExplainerConfig& config) {
  return n_distinct <= static_cast<std::size_t>(
                           std::clamp(config.exhaustive_limit, 0, 20));
}

double proximity(std::size_t kept, std::size_t total, double kernel_width) {
  // Cosine similarity of two binary vectors where one contains the other.
  const double distance =
      kept == 0 ? 1.0
                : 1.0 - std::sqrt(static_cast<double>(kept) /
                                  static_cast<double>(total));
  return std::exp(-distance * distance / (kernel_width * kernel_width));
}

std::vector<Perturbation> sample_perturbations(std::size_t n_distinct,
                                               const ExplainerConfig& config) {
  if (n_distinct == 0) {
    throw Error(ErrorCode::kNothingToExplain, "the report has no terms");
  }
  if (config.n_samples < 1 || !(config.kernel_width > 0.0)) {
    throw Error(ErrorCode::kInvalidInput,
                "sample count and kernel width must be positive");
  }
  std::vector<Perturbation> out;
  const auto make = [&](std::vector<bool> kept) {
    const auto n_kept =
        static_cast<std::size_t>(std::count(kept.begin(), kept.end(), true));
    out.push_back({std::move(kept), proximity(n_kept, n_distinct,
                                              config.kernel_width)});
  };
  make(std::vector<bool>(n_distinct, true));

  if (enumerates_subsets(n_distinct, config)) {
    const std::uint64_t full = (std::uint64_t{1} << n_distinct) - 1;
    for (std::uint64_t mask = 0; mask < full; ++mask) {
      std::vector<bool> kept(n_distinct);
      for (std::size_t j = 0; j < n_distinct; ++j) kept[j] = (mask >> j) & 1u;
      make(std::move(kept));
    }
    return out;
  }
  std::mt19937_64 rng(config.seed);
  std::bernoulli_distribution coin(0.5);
  for (int s = 1; s < config.n_samples; ++s) {
    std::vector<bool> kept(n_distinct);
    for (std::size_t j = 0; j < n_distinct; ++j) kept[j] = coin(rng);
    make(std::move(kept));
  }
  return out;
}

Explanation explain_class(std::string_view report_id,
                          std::span<const std::string> tokens,
                          const text::Vocabulary& vocabulary,
                          const classify::Predictor& model,
                          std::size_t class_index,
                          const ExplainerConfig& config) {
  require_proba(model);
  if (class_index >= model.classes().size()) {
    throw Error(ErrorCode::kInvalidInput, "class index out of range");
  }
  if (config.k < 1) throw Error(ErrorCode::kInvalidInput, "K must be positive");
  const auto terms = distinct_tokens(tokens);
  const auto samples = sample_perturbations(terms.size(), config);
  const std::size_t d = terms.size();
  const std::size_t n = samples.size();

  // Enumerated subsets stand in for the expected random sample, so each one
  // carries the weight of n_samples / 2^d draws.
  const double multiplicity =
      enumerates_subsets(d, config)
          ? static_cast<double>(config.n_samples) / static_cast<double>(n)
          : 1.0;

  std::vector<std::size_t> term_of_token(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    term_of_token[i] = static_cast<std::size_t>(
        std::find(terms.begin(), terms.end(), tokens[i]) - terms.begin());
  }

  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n), w(n);
  std::vector<std::string> kept_tokens;
  for (std::size_t s = 0; s < n; ++s) {
    kept_tokens.clear();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (samples[s].kept[term_of_token[i]]) kept_tokens.push_back(tokens[i]);
    }
    for (std::size_t j = 0; j < d; ++j) X(s, j) = samples[s].kept[j] ? 1.0 : 0.0;
    y(s) = model.predict_proba(text::vectorize(kept_tokens, vocabulary))[class_index];
    w(s) = samples[s].proximity * multiplicity;
  }

  const auto full = weighted_ridge(X, y, w, config.ridge_lambda);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(full.coefficients[a]) > std::fabs(full.coefficients[b]);
  });
  order.resize(std::min(d, static_cast<std::size_t>(config.k)));

  Eigen::MatrixXd X_selected(n, order.size());
  for (std::size_t j = 0; j < order.size(); ++j) X_selected.col(j) = X.col(order[j]);
  const auto selected = weighted_ridge(X_selected, y, w, config.ridge_lambda);

  Explanation e{std::string(report_id), model.classes()[class_index], {}, n,
                selected.r_squared};
  for (std::size_t j = 0; j < order.size(); ++j) {
    e.terms.push_back({terms[order[j]], selected.coefficients[j]});
  }
  std::stable_sort(e.terms.begin(), e.terms.end(),
                   [](const TermWeight& a, const TermWeight& b) {
                     return std::fabs(a.weight) > std::fabs(b.weight);
                   });
  return e;
}

Explanation explain(std::string_view report_id,
                    std::span<const std::string> tokens,
                    const text::Vocabulary& vocabulary,
                    const classify::Predictor& model,
                    const ExplainerConfig& config) {
  require_proba(model);
  const auto x = text::vectorize(tokens, vocabulary);
  return explain_class(report_id, tokens, vocabulary, model,
                       model.predict_index(x), config);
}

std::pair<Explanation, Explanation> explain_top2(
    std::string_view report_id, std::span<const std::string> tokens,
    const text::Vocabulary& vocabulary, const classify::Predictor& model,
    const ExplainerConfig& config) {
  require_proba(model);
  if (model.classes().size() < 2) {
    throw Error(ErrorCode::kUnsupported, "the model knows fewer than two teams");
  }
  const auto p = model.predict_proba(text::vectorize(tokens, vocabulary));
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return {explain_class(report_id, tokens, vocabulary, model, order[0], config),
          explain_class(report_id, tokens, vocabulary, model, order[1], config)};
}

nlohmann::json to_json(const Explanation& explanation) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : explanation.terms) {
    terms.push_back({{"term", t.term}, {"weight", t.weight}});
  }
  return {{"report_id", explanation.report_id},
          {"team", explanation.predicted_team.name()},
          {"terms", terms},
          {"fit", explanation.local_fit_score}};
}

void render_text(std::ostream& out, const Explanation& explanation) {
  constexpr double kBarWidth = 30.0;
  out << fmt::format("{} -> {} (fit {:.3f})\n", explanation.report_id,
                     explanation.predicted_team.name(),
                     explanation.local_fit_score);
  double largest = 0.0;
  std::size_t width = 4;
  for (const auto& t : explanation.terms) {
    largest = std::max(largest, std::fabs(t.weight));
    width = std::max(width, t.term.size());
  }
  for (const auto& t : explanation.terms) {
    const auto length = largest > 0.0
                            ? static_cast<std::size_t>(std::lround(
                                  kBarWidth * std::fabs(t.weight) / largest))
                            : 0;
    const std::string bar(length, t.weight >= 0.0 ? '+' : '-');
    out << fmt::format("  {:<{}}  {:<{}}  {:+.3f}\n", t.term, width, bar,
                       static_cast<std::size_t>(kBarWidth), t.weight);
  }
}

}  // namespace triage::explain
