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
#include <string>
#include <vector>

#include "triage/corpus.hpp"

namespace triage::testing {

// Letters-only pseudo-word: prefix followed by n written in base 26.
std::string word(const std::string& prefix, std::size_t n);

std::string team_name(std::size_t c);

corpus::IssueReport closed_report(std::string id, std::string summary,
                                  std::string description, Timestamp opened,
                                  const std::string& team,
                                  double hours_to_close = 24.0);

// Documents of `n_classes` teams, each drawing keywords from its own
// disjoint set plus shared filler words.
struct KeywordCorpusConfig {
  std::size_t n_classes = 6;
  std::size_t n_docs = 600;
  std::size_t keywords_per_class = 15;
  std::size_t n_fillers = 300;
  std::size_t keywords_per_doc = 4;
  std::size_t fillers_per_doc = 12;
  std::uint64_t seed = 1;
  Month month = std::chrono::year{2017} / std::chrono::January;
};
std::vector<corpus::IssueReport> keyword_corpus(const KeywordCorpusConfig& config);

// Reassigns `fraction` of the reports (chosen at random) to a different
// team drawn uniformly from `n_classes`.
void add_label_noise(std::vector<corpus::IssueReport>& reports, double fraction,
                     std::size_t n_classes, std::uint64_t seed);

// Monthly corpus whose per-team keyword sets lose `rotation` of their
// members to fresh words every month (retired words never return). With
// rotation 0 the corpus is stationary.
struct DriftingCorpusConfig {
  std::size_t n_months = 13;
  std::size_t n_classes = 6;
  std::size_t docs_per_class_per_month = 8;
  std::size_t active_keywords = 20;
  double rotation = 0.2;
  std::size_t keywords_per_doc = 3;
  std::size_t n_fillers = 200;
  std::size_t fillers_per_doc = 10;
  std::uint64_t seed = 7;
  Month first_month = std::chrono::year{2017} / std::chrono::January;
};
std::vector<corpus::IssueReport> drifting_corpus(const DriftingCorpusConfig& config);

}  // namespace triage::testing
