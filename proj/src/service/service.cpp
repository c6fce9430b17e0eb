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

#include <algorithm>

#include <fmt/format.h>

#include "triage/error.hpp"
#include "triage/service.hpp"

namespace triage::service {

Service::Service(ServiceConfig config)
    : config_(std::move(config)), log_(config_.log_path) {
  // Validates the detector settings up front.
  drift::OnlineDetector probe(config_.detector);
}

Service::~Service() {
  if (retrain_.valid()) retrain_.wait();
}

void Service::install(std::shared_ptr<const ModelArtifact> artifact) {
  if (!artifact || !artifact->model) {
    throw Error(ErrorCode::kInvalidInput, "cannot install an empty artifact");
  }
  auto published = std::make_shared<const Published>(
      Published{artifact, artifact->fingerprint()});
  std::lock_guard lock(model_mutex_);
  published_ = std::move(published);
}

std::shared_ptr<const ModelArtifact> Service::current() const {
  const auto published = snapshot();
  return published ? published->artifact : nullptr;
}

std::shared_ptr<const Service::Published> Service::snapshot() const {
  std::lock_guard lock(model_mutex_);
  return published_;
}

AssignResponse Service::assign(const AssignRequest& request) {
  const auto published = snapshot();
  if (!published) {
    throw Error(ErrorCode::kServiceUnavailable, "no model is loaded");
  }
  if (trim(request.report_id).empty()) {
    throw Error(ErrorCode::kInvalidInput, "report_id is required");
  }
  {
    std::lock_guard lock(log_mutex_);
    if (log_.find(request.report_id)) {
      throw Error(ErrorCode::kConflict,
                  fmt::format("report '{}' was already assigned", request.report_id));
    }
  }
  const auto& artifact = published->artifact;
  const auto tokens = text::tokenize(request.summary + " " + request.description,
                                     artifact->stop_words);
  const auto x = text::vectorize(tokens, artifact->vocabulary);
  if (x.empty()) {
    throw Error(ErrorCode::kAssignmentImpossible,
                tokens.empty() ? "the report has no text"
                               : "no term of the report is known to the model");
  }
  const auto& model = *artifact->model;
  const auto& team = model.predict(x);

  AssignResponse response{request.report_id, team, published->fingerprint,
                          std::nullopt};
  if (request.explain && model.supports_proba()) {
    response.explanation = explain::explain_class(
        request.report_id, tokens, artifact->vocabulary, model,
        model.predict_index(x), config_.explainer);
  }

  const auto now = now_utc();
  AssignmentRecord record{request.report_id, team,
                          now,               request.opened_at.value_or(now),
                          response.model_fingerprint, std::nullopt, std::nullopt};
  std::lock_guard lock(log_mutex_);
  log_.record_assignment(std::move(record));
  return response;
}

AssignmentRecord Service::feedback(const std::string& report_id,
                                   TeamId final_team, Timestamp closed_at) {
  std::lock_guard lock(log_mutex_);
  return log_.record_feedback(report_id, std::move(final_team), closed_at);
}

AccuracyStatus Service::accuracy(std::optional<Day> from,
                                 std::optional<Day> to) const {
  std::vector<eval::AssignmentOutcome> outcomes;
  {
    std::lock_guard lock(log_mutex_);
    outcomes = log_.outcomes();
  }
  const auto series = eval::daily_accuracy(outcomes);

  AccuracyStatus status;
  drift::OnlineDetector detector(config_.detector);
  for (const auto& point : series) {
    if (auto alert = detector.push(point.accuracy)) {
      status.alert = alert;
      status.alert_day = series[alert->day - 1].day;
      break;
    }
  }
  for (const auto& point : series) {
    if ((from && point.day < *from) || (to && point.day > *to)) continue;
    status.series.push_back(point);
  }
  return status;
}

nlohmann::json Service::model_info() const {
  const auto published = snapshot();
  if (!published) return {{"loaded", false}};
  const auto& artifact = published->artifact;
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : artifact->model->classes()) classes.push_back(c.name());
  return {{"loaded", true},
          {"format_version", artifact->format_version},
          {"descriptor", artifact->descriptor},
          {"classes", classes},
          {"vocabulary_size", artifact->vocabulary.size()},
          {"training_span",
           {format_month(artifact->training_start),
            format_month(artifact->training_end)}},
          {"created_at", format_timestamp(artifact->created_at)},
          {"corpus_fingerprint", artifact->corpus_fingerprint},
          {"fingerprint", published->fingerprint}};
}

std::shared_ptr<const ModelArtifact> Service::retrain(
    const std::filesystem::path& corpus_path, Month as_of,
    const TrainJobConfig& job, const text::StopWords& stop_words) {
  const auto loaded = corpus::load_corpus(corpus_path);
  auto artifact = std::make_shared<const ModelArtifact>(
      train_job(loaded.reports, as_of, stop_words, job));
  if (!config_.artifact_path.empty()) {
    save_artifact(config_.artifact_path, *artifact);
  }
  install(artifact);
  return artifact;
}

bool Service::retrain_async(std::filesystem::path corpus_path, Month as_of,
                            TrainJobConfig job, text::StopWords stop_words) {
  std::lock_guard lock(retrain_mutex_);
  if (retrain_.valid() &&
      retrain_.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
    return false;
  }
  retrain_ = std::async(std::launch::async, [this, corpus_path = std::move(corpus_path),
                                             as_of, job = std::move(job),
                                             stop_words = std::move(stop_words)] {
    retrain(corpus_path, as_of, job, stop_words);
  });
  return true;
}

void Service::wait_for_retrain() {
  std::future<void> pending;
  {
    std::lock_guard lock(retrain_mutex_);
    pending = std::move(retrain_);
  }
  if (pending.valid()) pending.get();
}

}  // namespace triage::service
