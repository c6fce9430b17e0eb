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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "triage/corpus.hpp"

namespace triage::text {

// Case-folded set of terms dropped by the tokenizer.
class StopWords {
 public:
  StopWords() = default;
  explicit StopWords(std::span<const std::string> words);

  // Plain text, one term per line; blank lines are ignored.
  static StopWords load(const std::filesystem::path& path);
  static StopWords english();

  bool contains(std::string_view term) const;
  // Sorted, for serialization.
  std::vector<std::string> words() const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Lowercases with Unicode simple case folding and splits on every code point
// outside the Unicode letter categories (Lu, Ll, Lt, Lm, Lo). Malformed UTF-8
// bytes act as separators. Stop words are removed; no stemming.
std::vector<std::string> tokenize(std::string_view text,
                                  const StopWords& stop_words);

// summary + " " + description, tokenized.
std::vector<std::string> preprocess(const corpus::IssueReport& report,
                                    const StopWords& stop_words);

struct Entry {
  std::uint32_t index;
  double weight;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Entries with strictly increasing indices and no explicit zeros.
class SparseVector {
 public:
  SparseVector() = default;
  // Throws Error(kShapeError) if the entries break the invariants.
  explicit SparseVector(std::vector<Entry> entries);

  std::span<const Entry> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  // One past the largest index, 0 when empty.
  std::size_t extent() const {
    return entries_.empty() ? 0 : entries_.back().index + 1;
  }

  double dot(std::span<const double> dense) const;
  double dot(const SparseVector& other) const;
  double squared_norm() const;
  double norm() const;
  SparseVector scaled(double factor) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Entry> entries_;
};

// Term index learned from training documents. Terms are indexed in order of
// first appearance; df counts documents, not occurrences.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Throws Error(kEmptyTrainingSet) when there are no documents or no tokens.
  static Vocabulary build(std::span<const std::vector<std::string>> documents);

  // For deserialization; validates df against n_docs.
  static Vocabulary from_parts(std::vector<std::string> terms,
                               std::vector<std::uint32_t> df,
                               std::uint32_t n_docs);

  std::optional<std::uint32_t> index_of(std::string_view term) const;
  const std::string& term(std::uint32_t index) const { return terms_[index]; }
  std::uint32_t df(std::uint32_t index) const { return df_[index]; }
  std::uint32_t n_docs() const { return n_docs_; }
  std::size_t size() const { return terms_.size(); }
  // ln(N / df_t).
  double idf(std::uint32_t index) const { return idf_[index]; }

  std::span<const std::string> terms() const { return terms_; }
  std::span<const std::uint32_t> document_frequencies() const { return df_; }

 private:
  void rebuild_index();

  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::vector<double> idf_;
  std::uint32_t n_docs_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

enum class Normalization { kL2, kNone };

// weight_t = tf_t * ln(N / df_t) over in-vocabulary terms, then L2
// normalization unless the vector is zero. Out-of-vocabulary terms are
// ignored and zero weights are dropped.
SparseVector vectorize(std::span<const std::string> tokens,
                       const Vocabulary& vocabulary,
                       Normalization normalization = Normalization::kL2);

}  // namespace triage::text
