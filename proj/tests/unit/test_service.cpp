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
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "synthetic.hpp"
#include "triage/error.hpp"
#include "triage/service.hpp"

using namespace triage;
using namespace triage::service;
using nlohmann::json;
namespace fs = std::filesystem;

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

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("triage_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const std::vector<corpus::IssueReport>& reports() {
  static const auto r = [] {
    testing::KeywordCorpusConfig config;
    config.n_docs = 240;
    config.n_classes = 3;
    config.month = parse_month("2017-03");
    return testing::keyword_corpus(config);
  }();
  return r;
}

std::shared_ptr<const ModelArtifact> artifact(
    classify::ModelSpec spec = classify::ClassifierKind::kLinearSvcCalibrated) {
  TrainJobConfig job;
  job.spec = spec;
  return std::make_shared<const ModelArtifact>(
      train_job(reports(), parse_month("2017-04"), text::StopWords::english(), job));
}

AssignRequest request(std::size_t i, bool explain = false) {
  const auto& r = reports()[i];
  return {r.id, r.summary, r.description, r.opened_at, explain};
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("training uses the months before the as-of month") {
    auto corpus = reports();
    corpus.push_back(testing::closed_report("late", "new words entirely", "fresh",
                                            parse_timestamp("2017-04-02T00:00:00Z"), "TEAM-9"));
    const auto a = train_job(corpus, parse_month("2017-04"), text::StopWords{});
    CHECK(a.training_start == parse_month("2016-04"));
    CHECK(a.training_end == parse_month("2017-03"));
    CHECK(a.model->classes().size() == 3);
    CHECK_FALSE(a.vocabulary.index_of("fresh"));
    CHECK(a.descriptor == "linear_svc");
    CHECK(code_of([&] { train_job(corpus, parse_month("2017-03"), text::StopWords{}); }) ==
          ErrorCode::kNoTrainingData);
  }

  TEST_CASE("artifacts round trip through bytes and files") {
    const auto a = artifact(classify::parse_spec("SELECTED-3:linear_svc_calibrated,knn,multinomial_nb"));
    const auto bytes = encode_artifact(*a);
    const auto b = decode_artifact(bytes);
    CHECK(b.fingerprint() == a->fingerprint());
    CHECK(b.descriptor == a->descriptor);
    CHECK(b.created_at == a->created_at);
    CHECK(b.corpus_fingerprint == a->corpus_fingerprint);
    CHECK(b.stop_words.words() == a->stop_words.words());
    for (std::size_t i = 0; i < 40; ++i) {
      const auto x = text::vectorize(text::preprocess(reports()[i], a->stop_words), a->vocabulary);
      CHECK(b.model->predict_proba(x) == a->model->predict_proba(x));
    }

    TempDir dir;
    save_artifact(dir.path / "m.bin", *a);
    save_artifact(dir.path / "m.bin", *a);
    CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator{}) == 1);
    CHECK(load_artifact(dir.path / "m.bin").fingerprint() == a->fingerprint());
    CHECK(code_of([&] { load_artifact(dir.path / "missing.bin"); }) == ErrorCode::kIoError);
  }

  TEST_CASE("fingerprint ignores the creation time") {
    auto a = *artifact();
    const auto before = a.fingerprint();
    a.created_at += std::chrono::hours(5);
    CHECK(a.fingerprint() == before);
    a.seed += 1;
    CHECK(a.fingerprint() != before);
  }

  TEST_CASE("corrupt artifacts are rejected") {
    const auto bytes = encode_artifact(*artifact(classify::ClassifierKind::kMultinomialNb));
    auto flipped = bytes;
    flipped.back() ^= 0x01;
    CHECK(code_of([&] { decode_artifact(flipped); }) == ErrorCode::kFormatError);
    auto magic = bytes;
    magic[0] = 'X';
    CHECK(code_of([&] { decode_artifact(magic); }) == ErrorCode::kFormatError);
    auto version = bytes;
    version[8] = 99;
    CHECK(code_of([&] { decode_artifact(version); }) == ErrorCode::kUnsupported);
    CHECK(code_of([&] { decode_artifact(std::span(bytes).first(bytes.size() - 3)); }) ==
          ErrorCode::kFormatError);
  }

  TEST_CASE("assignment log replays and survives a torn line") {
    TempDir dir;
    const auto path = dir.path / "log.jsonl";
    const auto t = parse_timestamp("2017-05-01T10:00:00Z");
    {
      AssignmentLog log(path);
      log.record_assignment({"r1", TeamId("A"), t, t, "fp", {}, {}});
      log.record_assignment({"r2", TeamId("B"), t, t, "fp", {}, {}});
      log.record_feedback("r1", TeamId("A"), t + std::chrono::hours(3));
      CHECK(code_of([&] { log.record_assignment({"r1", TeamId("A"), t, t, "fp", {}, {}}); }) ==
            ErrorCode::kConflict);
      CHECK(code_of([&] { log.record_feedback("r1", TeamId("B"), t); }) == ErrorCode::kConflict);
      CHECK(code_of([&] { log.record_feedback("zz", TeamId("B"), t); }) == ErrorCode::kNotFound);
    }
    std::ofstream(path, std::ios::app) << R"({"event":"assign","report_id":"r3","pre)";
    AssignmentLog replayed(path);
    CHECK(replayed.size() == 2);
    REQUIRE(replayed.find("r1"));
    CHECK(replayed.find("r1")->correct());
    CHECK_FALSE(replayed.find("r2")->closed());
    const auto outcomes = replayed.outcomes();
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0].actual == TeamId("A"));
    const auto j = to_json(*replayed.find("r1"));
    CHECK(j["correct"] == true);
    CHECK(j["final_team"] == "A");
  }

  TEST_CASE("assign, feedback and accuracy") {
    Service svc(ServiceConfig{});
    CHECK(code_of([&] { svc.assign(request(0)); }) == ErrorCode::kServiceUnavailable);
    CHECK(svc.model_info()["loaded"] == false);
    const auto model = artifact();
    svc.install(model);
    const auto r = svc.assign(request(0, true));
    CHECK(r.model_fingerprint == model->fingerprint());
    REQUIRE(r.explanation);
    CHECK(r.explanation->predicted_team == r.team);
    CHECK(code_of([&] { svc.assign(request(0)); }) == ErrorCode::kConflict);
    CHECK(code_of([&] { svc.assign({"x", "the and", "of", {}, false}); }) ==
          ErrorCode::kAssignmentImpossible);
    CHECK(code_of([&] { svc.assign({"y", "qqqq", "zzzz", {}, false}); }) ==
          ErrorCode::kAssignmentImpossible);
    CHECK(code_of([&] { svc.feedback("nope", TeamId("A"), now_utc()); }) == ErrorCode::kNotFound);
    for (std::size_t i = 1; i < 20; ++i) svc.assign(request(i));
    for (std::size_t i = 0; i < 20; ++i) {
      const auto& rep = reports()[i];
      svc.feedback(rep.id, *rep.closing_team, *rep.closed_at);
    }
    const auto status = svc.accuracy();
    REQUIRE_FALSE(status.series.empty());
    std::size_t total = 0;
    for (const auto& p : status.series) total += p.n_reports;
    CHECK(total == 20);
    CHECK_FALSE(status.alert);
    const auto info = svc.model_info();
    CHECK(info["fingerprint"] == model->fingerprint());
    CHECK(info["classes"].size() == 3);
  }

  TEST_CASE("accuracy alerts after a sustained drop") {
    ServiceConfig config;
    config.detector = {0.05, 2, 4};
    Service svc(config);
    svc.install(artifact(classify::ClassifierKind::kMultinomialNb));
    const auto start = parse_timestamp("2017-05-01T09:00:00Z");
    for (std::size_t day = 0; day < 12; ++day) {
      for (std::size_t k = 0; k < 5; ++k) {
        const std::size_t i = day * 5 + k;
        auto req = request(i);
        req.opened_at = start + std::chrono::days(day);
        const auto r = svc.assign(req);
        // The first week is answered correctly, the rest wrongly.
        const bool right = day < 6 || k == 0;
        svc.feedback(req.report_id, right ? r.team : TeamId("OTHER"), *req.opened_at);
      }
    }
    const auto status = svc.accuracy();
    REQUIRE(status.alert);
    // On the first bad day the minimum segment length pulls the boundary
    // one day early.
    CHECK(status.alert->boundary == 5);
    CHECK(status.alert->day == 7);
    CHECK(status.alert_day == parse_day("2017-05-07"));
    CHECK(svc.accuracy(parse_day("2017-05-03"), parse_day("2017-05-04")).series.size() == 2);
  }

  TEST_CASE("the log persists assignments across restarts") {
    TempDir dir;
    ServiceConfig config;
    config.log_path = dir.path / "log.jsonl";
    {
      Service svc(config);
      svc.install(artifact());
      svc.assign(request(0));
    }
    Service svc(config);
    svc.install(artifact());
    CHECK(code_of([&] { svc.assign(request(0)); }) == ErrorCode::kConflict);
  }

  TEST_CASE("retraining publishes a new model") {
    TempDir dir;
    const auto corpus = dir.path / "corpus.jsonl";
    corpus::save_corpus(corpus, reports());
    ServiceConfig config;
    config.artifact_path = dir.path / "model.bin";
    Service svc(config);
    TrainJobConfig job;
    job.spec = classify::ClassifierKind::kMultinomialNb;
    CHECK(svc.retrain_async(corpus, parse_month("2017-04"), job, text::StopWords{}));
    svc.wait_for_retrain();
    REQUIRE(svc.current());
    CHECK(svc.current()->descriptor == "multinomial_nb");
    CHECK(fs::exists(config.artifact_path));
    CHECK(svc.retrain_async(corpus, parse_month("2016-01"), job, text::StopWords{}));
    CHECK_THROWS_AS(svc.wait_for_retrain(), Error);
    CHECK(svc.current()->descriptor == "multinomial_nb");
  }

  TEST_CASE("HTTP routes and status codes") {
    Service svc(ServiceConfig{});
    httplib::Server server;
    const auto words = text::StopWords::english();
    mount_routes(server, svc, words);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    const auto post = [&](const char* route, const json& body) {
      return client.Post(route, body.dump(), "application/json");
    };
    const auto& rep = reports()[0];
    const json assign = {{"report_id", rep.id}, {"summary", rep.summary},
                         {"description", rep.description}, {"explain", true}};
    CHECK(post("/assign", assign)->status == 503);
    svc.install(artifact());
    const auto ok = post("/assign", assign);
    REQUIRE(ok->status == 200);
    const auto body = json::parse(ok->body);
    CHECK(body["model_fingerprint"] == svc.current()->fingerprint());
    CHECK(body["explanation"]["terms"].size() > 0);
    CHECK(post("/assign", assign)->status == 409);
    CHECK(post("/assign", {{"report_id", "n"}, {"summary", "qqq"}})->status == 422);
    CHECK(client.Post("/assign", "{oops", "application/json")->status == 400);
    CHECK(post("/feedback", {{"report_id", "zz"}, {"final_team", "A"}})->status == 404);
    const auto fb = post("/feedback", {{"report_id", rep.id}, {"final_team", rep.closing_team->name()},
                                       {"closed_at", "2017-03-20T00:00:00Z"}});
    REQUIRE(fb->status == 200);
    CHECK(json::parse(fb->body)["correct"].is_boolean());
    const auto acc = client.Get("/accuracy");
    REQUIRE(acc->status == 200);
    CHECK(json::parse(acc->body)["series"].size() == 1);
    CHECK(client.Get("/accuracy?from=bad")->status == 400);
    CHECK(json::parse(client.Get("/model")->body)["loaded"] == true);
    CHECK(post("/admin/retrain", {{"corpus", "/nonexistent.jsonl"}})->status == 202);
    CHECK_THROWS_AS(svc.wait_for_retrain(), Error);
    server.stop();
    listener.join();
    CHECK(http_status(ErrorCode::kIoError) == 500);
    CHECK(http_status(ErrorCode::kInvalidInput) == 400);
  }
}
