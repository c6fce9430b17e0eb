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

#include <fmt/format.h>

#include "triage/error.hpp"
#include "triage/textpipe.hpp"

namespace triage::text {

SparseVector::SparseVector(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].weight == 0.0 || !std::isfinite(entries_[i].weight)) {
      throw Error(ErrorCode::kShapeError,
                  fmt::format("entry {} has weight {}", i, entries_[i].weight));
    }
    if (i > 0 && entries_[i].index <= entries_[i - 1].index) {
      throw Error(ErrorCode::kShapeError,
                  "sparse indices must be strictly increasing");
    }
  }
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (const auto& e : entries_) {
    if (e.index < dense.size()) sum += e.weight * dense[e.index];
  }
  return sum;
}

double SparseVector::dot(const SparseVector& other) const {
  double sum = 0.0;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->index < b->index) {
      ++a;
    } else if (b->index < a->index) {
      ++b;
    } else {
      sum += a->weight * b->weight;
      ++a;
      ++b;
    }
  }
  return sum;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.weight * e.weight;
  return sum;
}

double SparseVector::norm() const { return std::sqrt(squared_norm()); }

SparseVector SparseVector::scaled(double factor) const {
  if (factor == 0.0) return {};
  std::vector<Entry> out(entries_);
  for (auto& e : out) e.weight *= factor;
  return SparseVector(std::move(out));
}

Vocabulary Vocabulary::build(
    std::span<const std::vector<std::string>> documents) {
  if (documents.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "no training documents");
  }
  Vocabulary vocab;
  std::vector<std::uint32_t> last_doc;  // per term, 1 + last document seen
  for (std::size_t d = 0; d < documents.size(); ++d) {
    for (const auto& token : documents[d]) {
      auto [it, inserted] = vocab.index_.try_emplace(
          token, static_cast<std::uint32_t>(vocab.terms_.size()));
      if (inserted) {
        vocab.terms_.push_back(token);
        vocab.df_.push_back(0);
        last_doc.push_back(0);
      }
      const auto index = it->second;
      if (last_doc[index] != d + 1) {
        last_doc[index] = static_cast<std::uint32_t>(d + 1);
        ++vocab.df_[index];
      }
    }
  }
  if (vocab.terms_.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "training documents have no terms");
  }
  vocab.n_docs_ = static_cast<std::uint32_t>(documents.size());
  vocab.idf_.resize(vocab.terms_.size());
  for (std::size_t i = 0; i < vocab.terms_.size(); ++i) {
    vocab.idf_[i] = std::log(static_cast<double>(vocab.n_docs_) /
                             static_cast<double>(vocab.df_[i]));
  }
  return vocab;
}

Vocabulary Vocabulary::from_parts(std::vector<std::string> terms,
                                  std::vector<std::uint32_t> df,
                                  std::uint32_t n_docs) {
  if (terms.size() != df.size()) {
    throw Error(ErrorCode::kShapeError, "terms and df differ in length");
  }
  Vocabulary vocab;
  vocab.terms_ = std::move(terms);
  vocab.df_ = std::move(df);
  vocab.n_docs_ = n_docs;
  vocab.idf_.resize(vocab.terms_.size());
  for (std::size_t i = 0; i < vocab.terms_.size(); ++i) {
    if (vocab.df_[i] == 0 || vocab.df_[i] > n_docs) {
      throw Error(ErrorCode::kFormatError,
                  fmt::format("df of '{}' out of range", vocab.terms_[i]));
    }
    vocab.idf_[i] = std::log(static_cast<double>(n_docs) /
                             static_cast<double>(vocab.df_[i]));
  }
  vocab.rebuild_index();
  return vocab;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<std::uint32_t>(i)).second) {
      throw Error(ErrorCode::kFormatError,
                  fmt::format("duplicate term '{}'", terms_[i]));
    }
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseVector vectorize(std::span<const std::string> tokens,
                       const Vocabulary& vocabulary,
                       Normalization normalization) {
  std::vector<std::uint32_t> hits;
  hits.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (auto index = vocabulary.index_of(token)) hits.push_back(*index);
  }
  std::sort(hits.begin(), hits.end());

  std::vector<Entry> entries;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    const double weight = static_cast<double>(j - i) * vocabulary.idf(hits[i]);
    if (weight > 0.0) entries.push_back({hits[i], weight});
    i = j;
  }
  if (normalization == Normalization::kL2 && !entries.empty()) {
    double norm = 0.0;
    for (const auto& e : entries) norm += e.weight * e.weight;
    norm = std::sqrt(norm);
    for (auto& e : entries) e.weight /= norm;
  }
  return SparseVector(std::move(entries));
}

}  // namespace triage::text
