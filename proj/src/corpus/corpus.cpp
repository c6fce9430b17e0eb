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

#include "triage/corpus.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "triage/error.hpp"

namespace triage {

TeamId::TeamId(std::string name) : name_(std::move(name)) {
  if (name_.empty()) {
    throw Error(ErrorCode::kInvalidInput, "team name must not be empty");
  }
  if (trim(name_).size() != name_.size()) {
    throw Error(ErrorCode::kInvalidInput,
                fmt::format("team name '{}' is not trimmed", name_));
  }
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view kSpace = " \t\n\r\f\v";
  const auto first = text.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(kSpace);
  return text.substr(first, last - first + 1);
}

}  // namespace triage

namespace triage::corpus {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::kFormatError, message);
}

const json& field(const json& object, const char* name) {
  const auto it = object.find(name);
  if (it == object.end()) invalid(fmt::format("missing field '{}'", name));
  return *it;
}

std::string string_field(const json& object, const char* name) {
  const json& value = field(object, name);
  if (!value.is_string()) invalid(fmt::format("field '{}' must be a string", name));
  return value.get<std::string>();
}

// Absent and null both mean "not present".
std::optional<std::string> optional_string(const json& object,
                                           const char* name) {
  const auto it = object.find(name);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) invalid(fmt::format("field '{}' must be a string", name));
  return it->get<std::string>();
}

TeamId team_from(const std::string& name, const char* field_name) {
  try {
    return TeamId(name);
  } catch (const Error& e) {
    invalid(fmt::format("field '{}': {}", field_name, e.what()));
  }
}

}  // namespace

std::string_view to_string(Status status) {
  return status == Status::kClosed ? "closed" : "open";
}

void validate(const IssueReport& report) {
  if (report.id.empty()) invalid("id must not be empty");
  const bool closed = report.status == Status::kClosed;
  if (closed != (report.closed_at.has_value() &&
                 report.closing_team.has_value())) {
    invalid(fmt::format(
        "report '{}': status must be closed exactly when closed_at and "
        "closing_team are present",
        report.id));
  }
  if (!closed && (report.closed_at || report.closing_team)) {
    invalid(fmt::format("report '{}': open report carries closing data",
                        report.id));
  }
  if (report.closed_at && *report.closed_at < report.opened_at) {
    invalid(fmt::format("report '{}': closed_at precedes opened_at",
                        report.id));
  }
  if (trim(report.summary).empty() && trim(report.description).empty()) {
    invalid(fmt::format("report '{}': summary and description are both empty",
                        report.id));
  }
}

json to_json(const IssueReport& report) {
  json out = json::object();
  out["id"] = report.id;
  out["summary"] = report.summary;
  out["description"] = report.description;
  out["opened_at"] = format_timestamp(report.opened_at);
  out["closed_at"] = report.closed_at
                         ? json(format_timestamp(*report.closed_at))
                         : json(nullptr);
  out["initial_team"] =
      report.initial_team ? json(report.initial_team->name()) : json(nullptr);
  out["closing_team"] =
      report.closing_team ? json(report.closing_team->name()) : json(nullptr);
  out["status"] = std::string(to_string(report.status));
  return out;
}

IssueReport report_from_json(const json& object) {
  if (!object.is_object()) invalid("line is not a JSON object");
  IssueReport report;
  report.id = string_field(object, "id");
  report.summary = string_field(object, "summary");
  report.description = string_field(object, "description");
  report.opened_at = parse_timestamp(string_field(object, "opened_at"));
  if (auto closed = optional_string(object, "closed_at")) {
    report.closed_at = parse_timestamp(*closed);
  }
  if (auto team = optional_string(object, "initial_team")) {
    report.initial_team = team_from(*team, "initial_team");
  }
  if (auto team = optional_string(object, "closing_team")) {
    report.closing_team = team_from(*team, "closing_team");
  }
  const std::string status = string_field(object, "status");
  if (status == "closed") {
    report.status = Status::kClosed;
  } else if (status == "open") {
    report.status = Status::kOpen;
  } else {
    invalid(fmt::format("unknown status '{}'", status));
  }
  validate(report);
  return report;
}

LoadResult parse_corpus(std::istream& in) {
  LoadResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    IssueReport report;
    try {
      report = report_from_json(json::parse(line));
    } catch (const json::exception& e) {
      result.diagnostics.push_back({line_no, e.what()});
      continue;
    } catch (const Error& e) {
      result.diagnostics.push_back({line_no, e.what()});
      continue;
    }
    if (!seen.insert(report.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  fmt::format("{} (line {})", report.id, line_no));
    }
    result.reports.push_back(std::move(report));
  }
  return result;
}

LoadResult load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot read corpus '{}'", path.string()));
  }
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const IssueReport> reports) {
  for (const auto& report : reports) out << to_json(report).dump() << '\n';
}

void save_corpus(const std::filesystem::path& path,
                 std::span<const IssueReport> reports) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot write corpus '{}'", path.string()));
  }
  write_corpus(out, reports);
  if (!out) {
    throw Error(ErrorCode::kIoError,
                fmt::format("write failed for '{}'", path.string()));
  }
}

std::vector<IssueReport> filter_closed(std::span<const IssueReport> reports) {
  std::vector<IssueReport> out;
  std::copy_if(reports.begin(), reports.end(), std::back_inserter(out),
               [](const IssueReport& r) { return r.status == Status::kClosed; });
  return out;
}

const TeamId& ground_truth(const IssueReport& report) {
  if (report.status != Status::kClosed || !report.closing_team) {
    throw Error(ErrorCode::kPreconditionViolation,
                fmt::format("report '{}' is not closed", report.id));
  }
  return *report.closing_team;
}

CorpusSlice month_slice(std::span<const IssueReport> reports, Month start,
                        Month end) {
  if (end < start) {
    throw Error(ErrorCode::kInvalidRange,
                fmt::format("{} is after {}", format_month(start),
                            format_month(end)));
  }
  CorpusSlice slice{{}, start, end};
  for (const auto& report : reports) {
    const Month m = month_of(report.opened_at);
    if (start <= m && m <= end) slice.reports.push_back(report);
  }
  std::stable_sort(slice.reports.begin(), slice.reports.end(),
                   [](const IssueReport& a, const IssueReport& b) {
                     return a.opened_at < b.opened_at;
                   });
  return slice;
}

std::string fingerprint(std::span<const IssueReport> reports) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& report : reports) {
    const std::string line = to_json(report).dump() + '\n';
    for (unsigned char c : line) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", hash);
}

}  // namespace triage::corpus
