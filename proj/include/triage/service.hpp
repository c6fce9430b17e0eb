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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "triage/classify.hpp"
#include "triage/corpus.hpp"
#include "triage/driftmon.hpp"
#include "triage/evalharness.hpp"
#include "triage/explain.hpp"
#include "triage/textpipe.hpp"

namespace httplib {
class Server;
}

namespace triage::service {

// ---- model artifact ---------------------------------------------------------

inline constexpr std::uint32_t kArtifactFormatVersion = 1;

// Everything needed to assign reports without the training corpus.
struct ModelArtifact {
  std::uint32_t format_version = kArtifactFormatVersion;
  std::string descriptor;  // classifier kind or ensemble spec
  text::Vocabulary vocabulary;
  text::StopWords stop_words;
  std::shared_ptr<const classify::Predictor> model;
  Month training_start{};
  Month training_end{};
  Timestamp created_at{};
  std::string corpus_fingerprint;
  std::uint64_t seed = 0;

  // Content hash of everything except created_at; identifies the model
  // version in assignment records.
  std::string fingerprint() const;
};

// Container layout: 8-byte magic "TRIAGEMD", u32 format version, u64
// payload length, u64 FNV-1a checksum of the payload, then the payload as
// CBOR. Integers are little-endian.
std::vector<std::uint8_t> encode_artifact(const ModelArtifact& artifact);
// Throws Error(kFormatError) for a bad magic, length or checksum and
// Error(kUnsupported) for an unknown format version.
ModelArtifact decode_artifact(std::span<const std::uint8_t> bytes);

// Writes to a temporary sibling and renames it into place, so readers see
// either the old file or the complete new one. Throws Error(kIoError).
void save_artifact(const std::filesystem::path& path,
                   const ModelArtifact& artifact);
ModelArtifact load_artifact(const std::filesystem::path& path);

// ---- training ---------------------------------------------------------------

struct TrainJobConfig {
  classify::ModelSpec spec = classify::ClassifierKind::kLinearSvc;
  classify::FitConfig fit;
  int window_months = 12;
};

// Fits on the closed reports opened in the `window_months` calendar months
// before `as_of`. Throws Error(kNoTrainingData) when that slice has nothing
// to train on.
ModelArtifact train_job(std::span<const corpus::IssueReport> reports,
                        Month as_of, const text::StopWords& stop_words,
                        const TrainJobConfig& config = {});

// Loads the corpus, trains and saves the artifact atomically.
ModelArtifact train_job(const std::filesystem::path& corpus_path, Month as_of,
                        const text::StopWords& stop_words,
                        const std::filesystem::path& artifact_path,
                        const TrainJobConfig& config = {});

// ---- assignment log ---------------------------------------------------------

struct AssignmentRecord {
  std::string report_id;
  TeamId predicted_team;
  Timestamp predicted_at;
  Timestamp opened_at;
  std::string model_fingerprint;
  std::optional<TeamId> final_team;
  std::optional<Timestamp> closed_at;

  bool closed() const { return final_team.has_value(); }
  bool correct() const { return final_team && *final_team == predicted_team; }
};

nlohmann::json to_json(const AssignmentRecord& record);

// Append-only JSON Lines event log ("assign" and "feedback" events). The
// in-memory state is always the replay of the file.
class AssignmentLog {
 public:
  // Empty path: in-memory only.
  explicit AssignmentLog(std::filesystem::path path = {});

  const AssignmentRecord* find(const std::string& report_id) const;
  // Throws Error(kConflict) for a known id.
  void record_assignment(AssignmentRecord record);
  // Throws Error(kNotFound) or Error(kConflict) when already closed.
  const AssignmentRecord& record_feedback(const std::string& report_id,
                                          TeamId final_team,
                                          Timestamp closed_at);
  // Closed records in the order they were assigned.
  std::vector<eval::AssignmentOutcome> outcomes() const;
  std::size_t size() const { return order_.size(); }

 private:
  void apply(const nlohmann::json& event);
  void append(const nlohmann::json& event);

  std::filesystem::path path_;
  std::ofstream out_;
  std::unordered_map<std::string, AssignmentRecord> records_;
  std::vector<std::string> order_;
};

// ---- service ----------------------------------------------------------------

struct ServiceConfig {
  std::filesystem::path log_path;       // empty: keep records in memory
  std::filesystem::path artifact_path;  // where retrains publish
  drift::DetectorConfig detector = drift::DetectorConfig::calibrated();
  explain::ExplainerConfig explainer;
};

struct AssignRequest {
  std::string report_id;
  std::string summary;
  std::string description;
  std::optional<Timestamp> opened_at;  // defaults to the request time
  bool explain = false;
};

struct AssignResponse {
  std::string report_id;
  TeamId team;
  std::string model_fingerprint;
  std::optional<explain::Explanation> explanation;
};

struct AccuracyStatus {
  eval::AccuracySeries series;
  std::optional<drift::Alert> alert;  // over the full history
  std::optional<Day> alert_day;
};

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  // Publishes a model; later assign calls use it, in-flight ones finish on
  // the one they started with.
  void install(std::shared_ptr<const ModelArtifact> artifact);
  std::shared_ptr<const ModelArtifact> current() const;

  // Errors: kServiceUnavailable without a model, kConflict for a repeated
  // id, kAssignmentImpossible when no in-vocabulary term remains.
  AssignResponse assign(const AssignRequest& request);
  AssignmentRecord feedback(const std::string& report_id, TeamId final_team,
                            Timestamp closed_at);
  AccuracyStatus accuracy(std::optional<Day> from = std::nullopt,
                          std::optional<Day> to = std::nullopt) const;
  nlohmann::json model_info() const;

  // Trains on the corpus, saves to config.artifact_path (when set) and
  // installs the result.
  std::shared_ptr<const ModelArtifact> retrain(
      const std::filesystem::path& corpus_path, Month as_of,
      const TrainJobConfig& job, const text::StopWords& stop_words);
  // Same, on a background thread. Returns false if a retrain is running.
  bool retrain_async(std::filesystem::path corpus_path, Month as_of,
                     TrainJobConfig job, text::StopWords stop_words);
  // Waits for a background retrain; rethrows its failure.
  void wait_for_retrain();

 private:
  struct Published {
    std::shared_ptr<const ModelArtifact> artifact;
    std::string fingerprint;
  };
  std::shared_ptr<const Published> snapshot() const;

  ServiceConfig config_;
  mutable std::mutex model_mutex_;
  std::shared_ptr<const Published> published_;
  mutable std::mutex log_mutex_;
  AssignmentLog log_;
  std::mutex retrain_mutex_;
  std::future<void> retrain_;
};

// Registers POST /assign, POST /feedback, GET /accuracy, GET /model and
// POST /admin/retrain on `server`.
void mount_routes(httplib::Server& server, Service& service,
                  const text::StopWords& default_stop_words);

// HTTP status for a library error code.
int http_status(ErrorCode code);

}  // namespace triage::service
