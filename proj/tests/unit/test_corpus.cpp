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

#include <doctest.h>

#include <random>
#include <sstream>

#include "synthetic.hpp"
#include "triage/corpus.hpp"
#include "triage/error.hpp"

using namespace triage;
using corpus::IssueReport;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kIoError;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("timestamps parse offsets and print UTC") {
    CHECK(format_timestamp(parse_timestamp("2017-03-04T10:20:30Z")) ==
          "2017-03-04T10:20:30Z");
    CHECK(format_timestamp(parse_timestamp("2017-03-04 10:20:30.1234+02:00")) ==
          "2017-03-04T08:20:30.123Z");
    CHECK(format_timestamp(parse_timestamp("2017-03-01T00:30:00-01:00")) ==
          "2017-03-01T01:30:00Z");
    CHECK(code_of([] { parse_timestamp("2017-13-01T00:00:00Z"); }) ==
          ErrorCode::kFormatError);
    CHECK(code_of([] { parse_timestamp("yesterday"); }) == ErrorCode::kFormatError);
    CHECK(format_month(parse_month("2016-11")) == "2016-11");
    CHECK(months_between(parse_month("2016-11"), parse_month("2017-02")) == 3);
    CHECK(add_months(parse_month("2016-11"), 14) == parse_month("2018-01"));
  }

  TEST_CASE("team ids are exact and trimmed") {
    CHECK(TeamId("DB") != TeamId("db"));
    CHECK(code_of([] { TeamId(" DB"); }) == ErrorCode::kInvalidInput);
    CHECK(code_of([] { TeamId(""); }) == ErrorCode::kInvalidInput);
    CHECK(trim("\t x \n") == "x");
  }

  TEST_CASE("report invariants") {
    auto r = testing::closed_report("A-1", "card declined", "", parse_timestamp("2017-01-02T00:00:00Z"), "PAY");
    CHECK_NOTHROW(corpus::validate(r));
    auto open = r;
    open.status = corpus::Status::kOpen;
    CHECK(code_of([&] { corpus::validate(open); }) == ErrorCode::kFormatError);
    auto backwards = r;
    backwards.closed_at = r.opened_at - std::chrono::hours(1);
    CHECK(code_of([&] { corpus::validate(backwards); }) == ErrorCode::kFormatError);
    auto blank = r;
    blank.summary = "  ";
    CHECK(code_of([&] { corpus::validate(blank); }) == ErrorCode::kFormatError);
    CHECK(corpus::ground_truth(r) == TeamId("PAY"));
    open.closed_at.reset();
    open.closing_team.reset();
    CHECK(code_of([&] { corpus::ground_truth(open); }) ==
          ErrorCode::kPreconditionViolation);
  }

  TEST_CASE("JSON Lines round trip with diagnostics") {
    const auto reports = testing::keyword_corpus({.n_docs = 30});
    std::stringstream buffer;
    corpus::write_corpus(buffer, reports);
    std::string text = buffer.str();
    text.insert(0, "\n{not json}\n{\"id\": \"x\"}\n");
    std::istringstream in(text);
    const auto loaded = corpus::parse_corpus(in);
    CHECK(loaded.reports == reports);
    REQUIRE(loaded.diagnostics.size() == 2);
    CHECK(loaded.diagnostics[0].line == 2);
    CHECK(loaded.diagnostics[1].line == 3);
  }

  TEST_CASE("duplicate ids and unreadable files are fatal") {
    const auto r = testing::closed_report("A-1", "x", "y", parse_timestamp("2017-01-02T00:00:00Z"), "T");
    std::stringstream buffer;
    const std::vector<IssueReport> twice = {r, r};
    corpus::write_corpus(buffer, twice);
    CHECK(code_of([&] { corpus::parse_corpus(buffer); }) == ErrorCode::kDuplicateId);
    CHECK(code_of([] { corpus::load_corpus("/nonexistent/corpus.jsonl"); }) ==
          ErrorCode::kIoError);
  }

  TEST_CASE("open reports keep null closing fields") {
    IssueReport r{"O-1", "s", "d", parse_timestamp("2017-01-02T00:00:00Z"),
                  std::nullopt, TeamId("T"), std::nullopt, corpus::Status::kOpen};
    const auto j = corpus::to_json(r);
    CHECK(j["closed_at"].is_null());
    CHECK(corpus::report_from_json(j) == r);
    const std::vector<IssueReport> mixed = {r, testing::closed_report("C-1", "s", "d", r.opened_at, "T")};
    const auto closed = corpus::filter_closed(mixed);
    REQUIRE(closed.size() == 1);
    CHECK(closed[0].id == "C-1");
  }

  TEST_CASE("month slices partition the corpus") {
    std::mt19937_64 rng(4);
    std::vector<IssueReport> reports;
    const auto base = parse_timestamp("2016-01-01T00:00:00Z");
    for (int i = 0; i < 300; ++i) {
      const auto offset = std::chrono::hours(rng() % (24 * 365 * 2));
      reports.push_back(testing::closed_report(std::to_string(i), "a", "b",
                                               base + offset, "T"));
    }
    std::size_t total = 0;
    for (int m = 0; m < 24; ++m) {
      const auto month = add_months(parse_month("2016-01"), m);
      const auto slice = corpus::month_slice(reports, month, month);
      total += slice.reports.size();
      for (std::size_t i = 0; i < slice.reports.size(); ++i) {
        CHECK(month_of(slice.reports[i].opened_at) == month);
        if (i) CHECK(slice.reports[i - 1].opened_at <= slice.reports[i].opened_at);
      }
    }
    CHECK(total == reports.size());
    const auto all = corpus::month_slice(reports, parse_month("2016-01"), parse_month("2017-12"));
    CHECK(all.reports.size() == reports.size());
    CHECK(code_of([&] {
            corpus::month_slice(reports, parse_month("2017-01"), parse_month("2016-01"));
          }) == ErrorCode::kInvalidRange);
  }

  TEST_CASE("slices keep input order on ties") {
    const auto t = parse_timestamp("2017-05-05T05:05:05Z");
    const std::vector<IssueReport> reports = {
        testing::closed_report("b", "x", "y", t, "T"),
        testing::closed_report("a", "x", "y", t, "T")};
    const auto slice = corpus::month_slice(reports, month_of(t), month_of(t));
    CHECK(slice.reports[0].id == "b");
  }

  TEST_CASE("fingerprint follows content") {
    auto reports = testing::keyword_corpus({.n_docs = 20});
    const auto a = corpus::fingerprint(reports);
    CHECK(a == corpus::fingerprint(reports));
    reports[3].summary += " more";
    CHECK(a != corpus::fingerprint(reports));
  }
}
