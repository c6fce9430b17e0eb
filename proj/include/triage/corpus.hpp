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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "triage/team.hpp"
#include "triage/timeutil.hpp"

namespace triage::corpus {

enum class Status { kOpen, kClosed };

std::string_view to_string(Status status);

// One filed issue. Invariants are enforced by validate(), which every
// loader calls:
//   status == closed  <=>  closed_at and closing_team are present
//   closed_at >= opened_at
//   summary and description are not both blank
struct IssueReport {
  std::string id;
  std::string summary;
  std::string description;
  Timestamp opened_at;
  std::optional<Timestamp> closed_at;
  std::optional<TeamId> initial_team;
  std::optional<TeamId> closing_team;
  Status status = Status::kOpen;

  friend bool operator==(const IssueReport&, const IssueReport&) = default;
};

// Throws Error(kFormatError) describing the first violated invariant.
void validate(const IssueReport& report);

nlohmann::json to_json(const IssueReport& report);
// Parses and validates one JSON object. Throws Error(kFormatError).
IssueReport report_from_json(const nlohmann::json& object);

struct Diagnostic {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct LoadResult {
  std::vector<IssueReport> reports;
  std::vector<Diagnostic> diagnostics;
};

// JSON Lines, one report per line, in file order. Blank lines are ignored;
// malformed lines are skipped and reported with their line number. A
// repeated id is fatal (Error kDuplicateId); an unreadable file is fatal
// (Error kIoError).
LoadResult load_corpus(const std::filesystem::path& path);
LoadResult parse_corpus(std::istream& in);

void write_corpus(std::ostream& out, std::span<const IssueReport> reports);
void save_corpus(const std::filesystem::path& path,
                 std::span<const IssueReport> reports);

// Reports with status == closed, order preserved.
std::vector<IssueReport> filter_closed(std::span<const IssueReport> reports);

// The team that closed the report. Throws Error(kPreconditionViolation) for
// open reports.
const TeamId& ground_truth(const IssueReport& report);

// Reports opened within an inclusive calendar-month range (UTC).
struct CorpusSlice {
  std::vector<IssueReport> reports;  // ascending opened_at
  Month start;
  Month end;
};

// Throws Error(kInvalidRange) when start > end. Ties in opened_at keep input
// order.
CorpusSlice month_slice(std::span<const IssueReport> reports, Month start,
                        Month end);

// FNV-1a over the canonical serialization of the reports; used to
// fingerprint the data a model was trained on.
std::string fingerprint(std::span<const IssueReport> reports);

}  // namespace triage::corpus
