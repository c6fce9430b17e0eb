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

#include "synthetic.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "triage/random.hpp"

namespace triage::testing {

std::string word(const std::string& prefix, std::size_t n) {
  std::string suffix;
  do {
    suffix.push_back(static_cast<char>('a' + n % 26));
    n /= 26;
  } while (n > 0);
  return prefix + suffix;
}

std::string team_name(std::size_t c) { return fmt::format("TEAM-{}", c + 1); }

corpus::IssueReport closed_report(std::string id, std::string summary,
                                  std::string description, Timestamp opened,
                                  const std::string& team,
                                  double hours_to_close) {
  corpus::IssueReport r;
  r.id = std::move(id);
  r.summary = std::move(summary);
  r.description = std::move(description);
  r.opened_at = opened;
  r.closed_at = opened + std::chrono::milliseconds(
                             static_cast<std::int64_t>(hours_to_close * 3'600'000.0));
  r.initial_team = TeamId(team);
  r.closing_team = TeamId(team);
  r.status = corpus::Status::kClosed;
  return r;
}

namespace {

Timestamp random_time_in(Month month, std::mt19937_64& rng) {
  const Day start{month / 1};
  const Day end{add_months(month, 1) / 1};
  const auto span_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
  std::uniform_int_distribution<std::int64_t> offset(0, span_ms - 1);
  return Timestamp(start) + std::chrono::milliseconds(offset(rng));
}

std::string join(const std::vector<std::string>& words, std::size_t from,
                 std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to && i < words.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

// Summary from the first three words, description from the rest.
corpus::IssueReport make_report(std::string id, std::vector<std::string> words,
                                Timestamp opened, const std::string& team,
                                std::mt19937_64& rng) {
  std::shuffle(words.begin(), words.end(), rng);
  std::uniform_real_distribution<double> hours(1.0, 120.0);
  return closed_report(std::move(id), join(words, 0, 3),
                       join(words, 3, words.size()), opened, team, hours(rng));
}

}  // namespace

std::vector<corpus::IssueReport> keyword_corpus(const KeywordCorpusConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick_keyword(0, config.keywords_per_class - 1);
  std::uniform_int_distribution<std::size_t> pick_filler(0, config.n_fillers - 1);
  std::vector<corpus::IssueReport> reports;
  for (std::size_t i = 0; i < config.n_docs; ++i) {
    const std::size_t c = i % config.n_classes;
    std::vector<std::string> words;
    for (std::size_t k = 0; k < config.keywords_per_doc; ++k) {
      words.push_back(word(word("kw", c) + "x", pick_keyword(rng)));
    }
    for (std::size_t k = 0; k < config.fillers_per_doc; ++k) {
      words.push_back(word("flr", pick_filler(rng)));
    }
    reports.push_back(make_report(fmt::format("K-{}", i + 1), std::move(words),
                                  random_time_in(config.month, rng),
                                  team_name(c), rng));
  }
  return reports;
}

void add_label_noise(std::vector<corpus::IssueReport>& reports, double fraction,
                     std::size_t n_classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(reports.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_noisy = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(reports.size())));
  std::uniform_int_distribution<std::size_t> other(1, n_classes - 1);
  for (std::size_t j = 0; j < n_noisy; ++j) {
    auto& r = reports[order[j]];
    std::size_t current = 0;
    while (team_name(current) != r.closing_team->name()) ++current;
    r.closing_team = TeamId(team_name((current + other(rng)) % n_classes));
  }
}

std::vector<corpus::IssueReport> drifting_corpus(const DriftingCorpusConfig& config) {
  std::mt19937_64 rng(config.seed);
  const auto per_month_change = static_cast<std::size_t>(
      std::llround(config.rotation * static_cast<double>(config.active_keywords)));
  // Active keyword ids per class; fresh ids come from a per-class counter.
  std::vector<std::vector<std::size_t>> active(config.n_classes);
  std::vector<std::size_t> next_id(config.n_classes, 0);
  for (std::size_t c = 0; c < config.n_classes; ++c) {
    for (std::size_t k = 0; k < config.active_keywords; ++k) {
      active[c].push_back(next_id[c]++);
    }
  }
  std::uniform_int_distribution<std::size_t> pick_active(0, config.active_keywords - 1);
  std::uniform_int_distribution<std::size_t> pick_filler(0, config.n_fillers - 1);
  std::vector<corpus::IssueReport> reports;
  std::size_t serial = 0;
  for (std::size_t m = 0; m < config.n_months; ++m) {
    if (m > 0) {
      // Retire the oldest words of each class.
      for (std::size_t c = 0; c < config.n_classes; ++c) {
        active[c].erase(active[c].begin(),
                        active[c].begin() + static_cast<long>(per_month_change));
        for (std::size_t k = 0; k < per_month_change; ++k) {
          active[c].push_back(next_id[c]++);
        }
      }
    }
    const Month month = add_months(config.first_month, static_cast<int>(m));
    for (std::size_t c = 0; c < config.n_classes; ++c) {
      for (std::size_t d = 0; d < config.docs_per_class_per_month; ++d) {
        std::vector<std::string> words;
        for (std::size_t k = 0; k < config.keywords_per_doc; ++k) {
          words.push_back(word(word("kw", c) + "x", active[c][pick_active(rng)]));
        }
        for (std::size_t k = 0; k < config.fillers_per_doc; ++k) {
          words.push_back(word("flr", pick_filler(rng)));
        }
        reports.push_back(make_report(fmt::format("D-{}", ++serial),
                                      std::move(words), random_time_in(month, rng),
                                      team_name(c), rng));
      }
    }
  }
  std::stable_sort(reports.begin(), reports.end(),
                   [](const auto& a, const auto& b) { return a.opened_at < b.opened_at; });
  return reports;
}

}  // namespace triage::testing
