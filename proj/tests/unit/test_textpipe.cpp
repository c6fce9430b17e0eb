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
#include <random>

#include "synthetic.hpp"
#include "triage/error.hpp"
#include "triage/textpipe.hpp"

using namespace triage;
using text::StopWords;
using Tokens = std::vector<std::string>;

TEST_SUITE("textpipe") {
  TEST_CASE("tokenizer splits on non-letters and folds case") {
    const StopWords none;
    CHECK(text::tokenize("Card-DECLINED at ATM#42, again!", none) ==
          Tokens{"card", "declined", "at", "atm", "again"});
    CHECK(text::tokenize("Überweisung FEHLGESCHLAGEN", none) ==
          Tokens{"überweisung", "fehlgeschlagen"});
    CHECK(text::tokenize("ОШИБКА входа", none) == Tokens{"ошибка", "входа"});
    CHECK(text::tokenize("naïve_user1x", none) == Tokens{"naïve", "user", "x"});
    CHECK(text::tokenize("", none).empty());
    CHECK(text::tokenize("123 456 !!", none).empty());
    // Invalid UTF-8 separates instead of failing.
    CHECK(text::tokenize(std::string("ab\xff" "cd"), none) == Tokens{"ab", "cd"});
  }

  TEST_CASE("stop words are removed after folding") {
    const std::vector<std::string> words = {"The", "at"};
    const StopWords stop(words);
    CHECK(stop.contains("the"));
    CHECK(text::tokenize("THE card at the ATM", stop) == Tokens{"card", "atm"});
    CHECK(StopWords::english().contains("the"));
    CHECK(StopWords::english().contains("and"));
  }

  TEST_CASE("vocabulary indexes by first appearance and counts documents") {
    const std::vector<Tokens> docs = {{"b", "a", "b"}, {"c", "a"}};
    const auto vocab = text::Vocabulary::build(docs);
    CHECK(vocab.terms()[0] == "b");
    CHECK(vocab.terms()[1] == "a");
    CHECK(vocab.terms()[2] == "c");
    CHECK(vocab.df(0) == 1);
    CHECK(vocab.df(1) == 2);
    CHECK(vocab.idf(1) == 0.0);
    CHECK(vocab.idf(0) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(text::Vocabulary::build(std::vector<Tokens>{}), Error);
    CHECK_THROWS_AS(text::Vocabulary::build(std::vector<Tokens>{{}, {}}), Error);
  }

  TEST_CASE("vectors are unit length, ignore unknown terms and drop zeros") {
    const std::vector<Tokens> docs = {{"x", "y", "common"}, {"z", "common"}, {"x", "common"}};
    const auto vocab = text::Vocabulary::build(docs);
    const Tokens doc = {"x", "x", "z", "common", "unknown"};
    const auto v = text::vectorize(doc, vocab);
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK(v.size() == 2);  // "common" has zero idf
    const auto raw = text::vectorize(doc, vocab, text::Normalization::kNone);
    CHECK(raw.entries()[0].weight == doctest::Approx(2.0 * std::log(1.5)));
    CHECK(text::vectorize(Tokens{"common", "unknown"}, vocab).empty());
  }

  TEST_CASE("repeating a document leaves its vector unchanged") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Tokens> docs(10);
      for (auto& d : docs) {
        for (int i = 0; i < 8; ++i) d.push_back(testing::word("w", rng() % 12));
      }
      const auto vocab = text::Vocabulary::build(docs);
      const auto once = text::vectorize(docs[0], vocab);
      Tokens thrice;
      for (int r = 0; r < 3; ++r) thrice.insert(thrice.end(), docs[0].begin(), docs[0].end());
      const auto repeated = text::vectorize(thrice, vocab);
      REQUIRE(once.size() == repeated.size());
      for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once.entries()[i].index == repeated.entries()[i].index);
        CHECK(once.entries()[i].weight == doctest::Approx(repeated.entries()[i].weight).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("sparse vectors enforce sorted nonzero entries") {
    using text::Entry;
    CHECK_THROWS_AS(text::SparseVector({{2, 1.0}, {1, 1.0}}), Error);
    CHECK_THROWS_AS(text::SparseVector({{1, 1.0}, {1, 2.0}}), Error);
    CHECK_THROWS_AS(text::SparseVector({{1, 0.0}}), Error);
    const text::SparseVector a({{0, 1.0}, {3, 2.0}});
    const text::SparseVector b({{3, 4.0}, {5, 1.0}});
    CHECK(a.dot(b) == 8.0);
    CHECK(a.extent() == 4);
    const std::vector<double> dense = {1.0, 0.0, 0.0, 0.5};
    CHECK(a.dot(dense) == 2.0);
    CHECK(a.scaled(2.0).squared_norm() == 20.0);
  }

  TEST_CASE("vocabulary parts are validated") {
    CHECK_NOTHROW(text::Vocabulary::from_parts({"a", "b"}, {1, 2}, 2));
    CHECK_THROWS_AS(text::Vocabulary::from_parts({"a", "b"}, {1, 3}, 2), Error);
    CHECK_THROWS_AS(text::Vocabulary::from_parts({"a", "a"}, {1, 1}, 2), Error);
    const auto v = text::Vocabulary::from_parts({"a", "b"}, {1, 2}, 2);
    CHECK(v.index_of("b") == 1u);
    CHECK_FALSE(v.index_of("c"));
  }
}
