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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "triage/classify.hpp"
#include "triage/textpipe.hpp"

namespace triage::explain {

struct ExplainerConfig {
  int k = 6;               // terms kept in the explanation
  int n_samples = 1000;    // perturbations when not enumerating
  double kernel_width = 25.0;
  double ridge_lambda = 1.0;
  // Reports with at most this many distinct tokens are explained over every
  // token subset instead of a random sample.
  int exhaustive_limit = 12;
  std::uint64_t seed = 42;
};

// One perturbed copy of a report: which distinct tokens survive, and its
// kernel weight exp(-d^2 / width^2) where d is the cosine distance between
// the presence vectors of the copy and the original.
struct Perturbation {
  std::vector<bool> kept;
  double proximity = 0.0;
};

// Distinct tokens in order of first appearance.
std::vector<std::string> distinct_tokens(std::span<const std::string> tokens);

// True when every token subset is used instead of a random sample.
bool enumerates_subsets(std::size_t n_distinct, const ExplainerConfig& config);

double proximity(std::size_t kept, std::size_t total, double kernel_width);

// Sample 0 is always the full report. Throws Error(kNothingToExplain) when
// `n_distinct` is 0.
std::vector<Perturbation> sample_perturbations(std::size_t n_distinct,
                                               const ExplainerConfig& config);

struct TermWeight {
  std::string term;
  double weight = 0.0;  // > 0 supports the explained team
};

struct Explanation {
  std::string report_id;
  TeamId predicted_team;  // the team whose probability is explained
  std::vector<TermWeight> terms;  // by |weight| descending
  std::size_t sample_count = 0;
  double local_fit_score = 0.0;  // weighted R^2 of the K-term model
};

// Explains the model's probability for `class_index`: every perturbation
// is vectorized and scored, a proximity-weighted ridge regression is fitted
// on term presence, the K largest |coefficients| are kept and the model is
// refitted on them. Throws Error(kUnsupported) for probability-incapable
// models and Error(kNothingToExplain) for reports without tokens.
Explanation explain_class(std::string_view report_id,
                          std::span<const std::string> tokens,
                          const text::Vocabulary& vocabulary,
                          const classify::Predictor& model,
                          std::size_t class_index,
                          const ExplainerConfig& config = {});

// Explains the model's most likely team for the report.
Explanation explain(std::string_view report_id,
                    std::span<const std::string> tokens,
                    const text::Vocabulary& vocabulary,
                    const classify::Predictor& model,
                    const ExplainerConfig& config = {});

// Explanations for the two most likely teams (ties go to the lower class
// index). Throws Error(kUnsupported) for models with fewer than two classes.
std::pair<Explanation, Explanation> explain_top2(
    std::string_view report_id, std::span<const std::string> tokens,
    const text::Vocabulary& vocabulary, const classify::Predictor& model,
    const ExplainerConfig& config = {});

// {"report_id", "team", "terms": [{"term", "weight"}], "fit"}
nlohmann::json to_json(const Explanation& explanation);

// Term, signed bar, weight to three decimals; one line per term.
void render_text(std::ostream& out, const Explanation& explanation);

}  // namespace triage::explain
