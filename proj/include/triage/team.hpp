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

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace triage {

// A development team. The name is case-sensitive and compared exactly; it
// must be non-empty and carry no leading or trailing whitespace.
class TeamId {
 public:
  explicit TeamId(std::string name);

  const std::string& name() const noexcept { return name_; }

  friend auto operator<=>(const TeamId&, const TeamId&) = default;
  friend bool operator==(const TeamId&, const TeamId&) = default;

 private:
  std::string name_;
};

// Strips ASCII whitespace (space, \t, \n, \r, \f, \v) from both ends.
std::string_view trim(std::string_view text);

}  // namespace triage

template <>
struct std::hash<triage::TeamId> {
  std::size_t operator()(const triage::TeamId& team) const noexcept {
    return std::hash<std::string>{}(team.name());
  }
};
