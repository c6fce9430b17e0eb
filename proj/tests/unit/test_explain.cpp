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

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "synthetic.hpp"
#include "triage/error.hpp"
#include "triage/explain.hpp"

using namespace triage;
using namespace triage::explain;
using Tokens = std::vector<std::string>;

namespace {

// P(class 0) is an additive function of which terms are present.
class AdditiveModel final : public classify::Predictor {
 public:
  AdditiveModel(std::vector<double> effects, double base)
      : effects_(std::move(effects)), base_(base) {}
  std::span<const TeamId> classes() const override { return classes_; }
  std::size_t dimension() const override { return effects_.size(); }
  bool supports_proba() const override { return true; }
  std::size_t predict_index(const text::SparseVector& x) const override {
    return predict_proba(x)[0] >= 0.5 ? 0 : 1;
  }
  std::vector<double> predict_proba(const text::SparseVector& x) const override {
    double p = base_;
    for (const auto& e : x.entries()) p += effects_[e.index];
    return {p, 1.0 - p};
  }
  std::string describe() const override { return "additive"; }
  nlohmann::json to_json() const override { return {}; }

 private:
  std::vector<double> effects_;
  double base_;
  std::vector<TeamId> classes_{TeamId("A"), TeamId("B")};
};

text::Vocabulary vocabulary_of(const Tokens& tokens) {
  // A second document keeps every report term's idf positive.
  return text::Vocabulary::build(std::vector<Tokens>{tokens, {"zzz"}});
}

}  // namespace

TEST_SUITE("explain") {
  TEST_CASE("proximity kernel") {
    CHECK(proximity(5, 5, 25.0) == 1.0);
    const double d = 1.0 - std::sqrt(2.0 / 8.0);
    CHECK(proximity(2, 8, 25.0) == doctest::Approx(std::exp(-d * d / 625.0)));
    CHECK(proximity(2, 8, 0.5) < proximity(6, 8, 0.5));
  }

  TEST_CASE("distinct tokens keep first appearance") {
    CHECK(distinct_tokens(Tokens{"b", "a", "b", "c", "a"}) == Tokens{"b", "a", "c"});
  }

  TEST_CASE("perturbations") {
    ExplainerConfig config;
    const auto small = sample_perturbations(4, config);
    CHECK(enumerates_subsets(4, config));
    CHECK(small.size() == 16);
    CHECK(std::count(small[0].kept.begin(), small[0].kept.end(), true) == 4);
    std::set<std::vector<bool>> distinct;
    for (const auto& p : small) distinct.insert(p.kept);
    CHECK(distinct.size() == 16);

    CHECK_FALSE(enumerates_subsets(30, config));
    const auto large = sample_perturbations(30, config);
    CHECK(large.size() == static_cast<std::size_t>(config.n_samples));
    CHECK(std::count(large[0].kept.begin(), large[0].kept.end(), true) == 30);
    CHECK(large[1].kept == sample_perturbations(30, config)[1].kept);
    auto other = config;
    other.seed = 7;
    CHECK(large[1].kept != sample_perturbations(30, other)[1].kept);
    CHECK_THROWS_AS(sample_perturbations(0, config), Error);
  }

  TEST_CASE("enumeration recovers an additive model") {
    const Tokens tokens = {"alpha", "beta", "gamma", "delta", "beta"};
    const auto vocab = vocabulary_of(tokens);
    std::vector<double> effects(vocab.size(), 0.0);
    effects[*vocab.index_of("alpha")] = 0.3;
    effects[*vocab.index_of("beta")] = -0.2;
    effects[*vocab.index_of("gamma")] = 0.05;
    const AdditiveModel model(effects, 0.4);
    ExplainerConfig config;
    config.ridge_lambda = 1e-10;
    config.k = 4;
    const auto e = explain_class("r", tokens, vocab, model, 0, config);
    REQUIRE(e.terms.size() == 4);
    CHECK(e.terms[0].term == "alpha");
    CHECK(e.terms[0].weight == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(e.terms[1].term == "beta");
    CHECK(e.terms[1].weight == doctest::Approx(-0.2).epsilon(1e-6));
    CHECK(e.terms[2].weight == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(std::fabs(e.terms[3].weight) < 1e-6);
    CHECK(e.local_fit_score == doctest::Approx(1.0));
    CHECK(e.predicted_team == TeamId("A"));
  }

  TEST_CASE("ridge shrinks but keeps the ranking") {
    const Tokens tokens = {"alpha", "beta", "gamma"};
    const auto vocab = vocabulary_of(tokens);
    std::vector<double> effects(vocab.size(), 0.0);
    effects[0] = 0.3;
    effects[1] = 0.1;
    const AdditiveModel model(effects, 0.2);
    const auto e = explain_class("r", tokens, vocab, model, 0);
    REQUIRE(e.terms.size() == 3);
    CHECK(e.terms[0].term == "alpha");
    CHECK(e.terms[0].weight < 0.3);
    CHECK(e.terms[0].weight > 0.0);
    CHECK(e.local_fit_score >= 0.0);
    CHECK(e.local_fit_score <= 1.0);
  }

  TEST_CASE("sampled explanations are reproducible") {
    Tokens tokens;
    for (int i = 0; i < 25; ++i) tokens.push_back(testing::word("t", i));
    const auto vocab = vocabulary_of(tokens);
    std::vector<double> effects(vocab.size(), 0.0);
    effects[3] = 0.4;
    const AdditiveModel model(effects, 0.3);
    const auto a = explain::explain("r", tokens, vocab, model);
    const auto b = explain::explain("r", tokens, vocab, model);
    CHECK(to_json(a) == to_json(b));
    CHECK(a.terms.size() == 6);
    CHECK(a.terms[0].term == testing::word("t", 3));
    CHECK(a.sample_count == 1000);
  }

  TEST_CASE("top two explanations and rendering") {
    const Tokens tokens = {"alpha", "beta"};
    const auto vocab = vocabulary_of(tokens);
    const AdditiveModel model({0.3, -0.1, 0.0}, 0.4);
    const auto [first, second] = explain_top2("r", tokens, vocab, model);
    CHECK(first.predicted_team == TeamId("A"));
    CHECK(second.predicted_team == TeamId("B"));
    CHECK(first.terms[0].weight == doctest::Approx(-second.terms[0].weight));
    const auto j = to_json(first);
    CHECK(j["report_id"] == "r");
    CHECK(j["team"] == "A");
    CHECK(j["terms"][0]["term"] == "alpha");
    std::ostringstream out;
    render_text(out, first);
    CHECK(out.str().find("alpha") != std::string::npos);
    CHECK(out.str().find('+') != std::string::npos);
  }

  TEST_CASE("errors") {
    const Tokens tokens = {"alpha"};
    const auto vocab = vocabulary_of(tokens);
    const AdditiveModel model({0.1, 0.0}, 0.4);
    CHECK_THROWS_AS(explain::explain("r", Tokens{}, vocab, model), Error);
    const std::vector<text::SparseVector> X = {text::SparseVector({{0, 1.0}}),
                                               text::SparseVector({{1, 1.0}})};
    const std::vector<TeamId> y = {TeamId("A"), TeamId("B")};
    const auto svc = classify::fit(classify::ClassifierKind::kLinearSvc, X, y, 2);
    try {
      explain::explain("r", tokens, vocab, svc);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnsupported);
    }
  }
}
