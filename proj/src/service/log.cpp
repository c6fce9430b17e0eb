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

#include <string>

#include <fmt/format.h>

#include "triage/error.hpp"
#include "triage/service.hpp"

namespace triage::service {

using nlohmann::json;

json to_json(const AssignmentRecord& r) {
  json j = {{"report_id", r.report_id},
            {"predicted_team", r.predicted_team.name()},
            {"predicted_at", format_timestamp(r.predicted_at)},
            {"opened_at", format_timestamp(r.opened_at)},
            {"model_fingerprint", r.model_fingerprint},
            {"final_team", nullptr},
            {"closed_at", nullptr},
            {"correct", nullptr}};
  if (r.final_team) {
    j["final_team"] = r.final_team->name();
    j["correct"] = r.correct();
  }
  if (r.closed_at) j["closed_at"] = format_timestamp(*r.closed_at);
  return j;
}

AssignmentLog::AssignmentLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.empty()) return;
  if (std::ifstream in{path_}) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (line.empty()) continue;
      json event;
      try {
        event = json::parse(line);
      } catch (const json::parse_error&) {
        // A torn final line from an interrupted append is dropped.
        if (in.peek() == std::char_traits<char>::eof()) break;
        throw Error(ErrorCode::kFormatError,
                    fmt::format("{}:{}: malformed event", path_.string(), number));
      }
      apply(event);
    }
  }
  out_.open(path_, std::ios::app);
  if (!out_) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot open '{}' for appending", path_.string()));
  }
}

const AssignmentRecord* AssignmentLog::find(const std::string& report_id) const {
  const auto it = records_.find(report_id);
  return it == records_.end() ? nullptr : &it->second;
}

void AssignmentLog::apply(const json& event) {
  const auto type = event.at("event").get<std::string>();
  const auto id = event.at("report_id").get<std::string>();
  if (type == "assign") {
    if (records_.contains(id)) {
      throw Error(ErrorCode::kConflict,
                  fmt::format("report '{}' was already assigned", id));
    }
    AssignmentRecord r{id,
                       TeamId(event.at("predicted_team").get<std::string>()),
                       parse_timestamp(event.at("predicted_at").get<std::string>()),
                       parse_timestamp(event.at("opened_at").get<std::string>()),
                       event.at("model_fingerprint").get<std::string>(),
                       std::nullopt,
                       std::nullopt};
    records_.emplace(id, std::move(r));
    order_.push_back(id);
  } else if (type == "feedback") {
    const auto it = records_.find(id);
    if (it == records_.end()) {
      throw Error(ErrorCode::kNotFound, fmt::format("no assignment for '{}'", id));
    }
    if (it->second.closed()) {
      throw Error(ErrorCode::kConflict,
                  fmt::format("report '{}' already has feedback", id));
    }
    it->second.final_team = TeamId(event.at("final_team").get<std::string>());
    it->second.closed_at = parse_timestamp(event.at("closed_at").get<std::string>());
  } else {
    throw Error(ErrorCode::kFormatError, fmt::format("unknown event '{}'", type));
  }
}

void AssignmentLog::append(const json& event) {
  if (!out_.is_open()) return;
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot append to '{}'", path_.string()));
  }
}

void AssignmentLog::record_assignment(AssignmentRecord record) {
  const json event = {{"event", "assign"},
                      {"report_id", record.report_id},
                      {"predicted_team", record.predicted_team.name()},
                      {"predicted_at", format_timestamp(record.predicted_at)},
                      {"opened_at", format_timestamp(record.opened_at)},
                      {"model_fingerprint", record.model_fingerprint}};
  apply(event);
  append(event);
}

const AssignmentRecord& AssignmentLog::record_feedback(
    const std::string& report_id, TeamId final_team, Timestamp closed_at) {
  const json event = {{"event", "feedback"},
                      {"report_id", report_id},
                      {"final_team", final_team.name()},
                      {"closed_at", format_timestamp(closed_at)}};
  apply(event);
  append(event);
  return records_.at(report_id);
}

std::vector<eval::AssignmentOutcome> AssignmentLog::outcomes() const {
  std::vector<eval::AssignmentOutcome> out;
  for (const auto& id : order_) {
    const auto& r = records_.at(id);
    if (r.final_team) out.push_back({r.opened_at, r.predicted_team, *r.final_team});
  }
  return out;
}

}  // namespace triage::service
