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

#include <chrono>
#include <string>
#include <string_view>

namespace triage {

// UTC instant with millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Day = std::chrono::sys_days;
using Month = std::chrono::year_month;

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff...][Z|+hh:mm|-hh:mm]" (a space may
// replace 'T'). Fractional digits beyond milliseconds are truncated.
// Throws Error(kFormatError) on anything else.
Timestamp parse_timestamp(std::string_view text);

// Always UTC with a 'Z' suffix; milliseconds are printed only when nonzero.
std::string format_timestamp(Timestamp ts);

// "YYYY-MM".
Month parse_month(std::string_view text);
std::string format_month(Month month);

// "YYYY-MM-DD".
Day parse_day(std::string_view text);
std::string format_day(Day day);

Month month_of(Timestamp ts);
Day day_of(Timestamp ts);

// Calendar months from `from` to `to` (negative when `to` is earlier).
int months_between(Month from, Month to);
Month add_months(Month month, int n);

Timestamp now_utc();

}  // namespace triage
