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

#include "triage/timeutil.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "triage/error.hpp"

namespace triage {
namespace {

using std::chrono::days;
using std::chrono::hours;
using std::chrono::milliseconds;
using std::chrono::minutes;
using std::chrono::seconds;

[[noreturn]] void bad(std::string_view text, std::string_view what) {
  throw Error(ErrorCode::kFormatError,
              fmt::format("cannot parse '{}': {}", text, what));
}

// Reads exactly `width` digits at `pos`.
int digits(std::string_view text, std::size_t pos, std::size_t width) {
  if (pos + width > text.size()) bad(text, "truncated");
  int value = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      bad(text, "expected digit");
    }
    value = value * 10 + (text[i] - '0');
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    bad(text, fmt::format("expected '{}' at offset {}", c, pos));
  }
}

std::chrono::year_month_day checked_date(std::string_view text, int y, int m,
                                         int d) {
  std::chrono::year_month_day ymd{std::chrono::year{y},
                                  std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad(text, "invalid calendar date");
  return ymd;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS
  const int year = digits(text, 0, 4);
  expect(text, 4, '-');
  const int month = digits(text, 5, 2);
  expect(text, 7, '-');
  const int day = digits(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't' &&
                            text[10] != ' ')) {
    bad(text, "expected time part");
  }
  const int hour = digits(text, 11, 2);
  expect(text, 13, ':');
  const int minute = digits(text, 14, 2);
  expect(text, 16, ':');
  const int second = digits(text, 17, 2);
  if (hour > 23 || minute > 59 || second > 60) bad(text, "time out of range");

  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t n = 0;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (n < 3) millis = millis * 10 + (text[pos] - '0');
      ++n;
      ++pos;
    }
    if (n == 0) bad(text, "empty fraction");
    for (; n < 3; ++n) millis *= 10;
  }

  minutes offset{0};
  if (pos >= text.size()) bad(text, "missing UTC offset");
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    const int oh = digits(text, pos + 1, 2);
    expect(text, pos + 3, ':');
    const int om = digits(text, pos + 4, 2);
    offset = minutes{sign * (oh * 60 + om)};
    pos += 6;
  } else {
    bad(text, "bad UTC offset");
  }
  if (pos != text.size()) bad(text, "trailing characters");

  const auto date = checked_date(text, year, month, day);
  return Timestamp{std::chrono::sys_days{date}} + hours{hour} +
         minutes{minute} + seconds{second} + milliseconds{millis} - offset;
}

std::string format_timestamp(Timestamp ts) {
  const Day day = std::chrono::floor<days>(ts);
  const std::chrono::year_month_day ymd{day};
  auto rest = ts - day;
  const auto h = std::chrono::duration_cast<hours>(rest);
  rest -= h;
  const auto m = std::chrono::duration_cast<minutes>(rest);
  rest -= m;
  const auto s = std::chrono::duration_cast<seconds>(rest);
  rest -= s;
  const auto ms = rest.count();
  std::string out = fmt::format(
      "{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}", static_cast<int>(ymd.year()),
      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
      h.count(), m.count(), s.count());
  if (ms != 0) out += fmt::format(".{:03d}", ms);
  out += 'Z';
  return out;
}

Month parse_month(std::string_view text) {
  if (text.size() != 7) bad(text, "expected YYYY-MM");
  const int year = digits(text, 0, 4);
  expect(text, 4, '-');
  const int month = digits(text, 5, 2);
  if (month < 1 || month > 12) bad(text, "month out of range");
  return Month{std::chrono::year{year},
               std::chrono::month{static_cast<unsigned>(month)}};
}

std::string format_month(Month month) {
  return fmt::format("{:04d}-{:02d}", static_cast<int>(month.year()),
                     static_cast<unsigned>(month.month()));
}

Day parse_day(std::string_view text) {
  if (text.size() != 10) bad(text, "expected YYYY-MM-DD");
  const int year = digits(text, 0, 4);
  expect(text, 4, '-');
  const int month = digits(text, 5, 2);
  expect(text, 7, '-');
  const int day = digits(text, 8, 2);
  return Day{checked_date(text, year, month, day)};
}

std::string format_day(Day day) {
  const std::chrono::year_month_day ymd{day};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

Month month_of(Timestamp ts) {
  const std::chrono::year_month_day ymd{day_of(ts)};
  return Month{ymd.year(), ymd.month()};
}

Day day_of(Timestamp ts) { return std::chrono::floor<days>(ts); }

int months_between(Month from, Month to) {
  return (static_cast<int>(to.year()) - static_cast<int>(from.year())) * 12 +
         static_cast<int>(static_cast<unsigned>(to.month())) -
         static_cast<int>(static_cast<unsigned>(from.month()));
}

Month add_months(Month month, int n) {
  return month + std::chrono::months{n};
}

Timestamp now_utc() {
  return std::chrono::time_point_cast<milliseconds>(
      std::chrono::system_clock::now());
}

}  // namespace triage
