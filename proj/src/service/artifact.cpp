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

#include <unistd.h>

#include <array>
#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "triage/error.hpp"
#include "triage/service.hpp"

namespace triage::service {
namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic = {'T', 'R', 'I', 'A', 'G', 'E', 'M', 'D'};
constexpr std::size_t kHeaderSize = 8 + 4 + 8 + 8;

static_assert(std::endian::native == std::endian::little,
              "artifact encoding assumes a little-endian host");

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

json payload_of(const ModelArtifact& a) {
  const auto df = a.vocabulary.document_frequencies();
  std::vector<std::uint8_t> df_bytes(df.size() * sizeof(std::uint32_t));
  if (!df.empty()) std::memcpy(df_bytes.data(), df.data(), df_bytes.size());
  return {{"descriptor", a.descriptor},
          {"vocabulary",
           {{"terms", a.vocabulary.terms()},
            {"df", json::binary(std::move(df_bytes))},
            {"n_docs", a.vocabulary.n_docs()}}},
          {"stop_words", a.stop_words.words()},
          {"model", a.model ? a.model->to_json() : json()},
          {"training_start", format_month(a.training_start)},
          {"training_end", format_month(a.training_end)},
          {"created_at", format_timestamp(a.created_at)},
          {"corpus_fingerprint", a.corpus_fingerprint},
          {"seed", a.seed}};
}

}  // namespace

std::string ModelArtifact::fingerprint() const {
  auto payload = payload_of(*this);
  payload.erase("created_at");
  return fmt::format("{:016x}", fnv1a(json::to_cbor(payload)));
}

std::vector<std::uint8_t> encode_artifact(const ModelArtifact& artifact) {
  if (!artifact.model) {
    throw Error(ErrorCode::kInvalidInput, "artifact has no model");
  }
  const auto payload = json::to_cbor(payload_of(artifact));
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put<std::uint32_t>(out, artifact.format_version);
  put<std::uint64_t>(out, payload.size());
  put<std::uint64_t>(out, fnv1a(payload));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

ModelArtifact decode_artifact(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kFormatError, "not a model artifact");
  }
  const auto version = get<std::uint32_t>(bytes, 8);
  if (version != kArtifactFormatVersion) {
    throw Error(ErrorCode::kUnsupported,
                fmt::format("artifact format version {} (expected {})", version,
                            kArtifactFormatVersion));
  }
  const auto length = get<std::uint64_t>(bytes, 12);
  const auto checksum = get<std::uint64_t>(bytes, 20);
  if (length != bytes.size() - kHeaderSize) {
    throw Error(ErrorCode::kFormatError, "artifact is truncated");
  }
  const auto payload = bytes.subspan(kHeaderSize);
  if (fnv1a(payload) != checksum) {
    throw Error(ErrorCode::kFormatError, "artifact checksum mismatch");
  }

  try {
    const auto j = json::from_cbor(payload.begin(), payload.end());
    ModelArtifact a;
    a.format_version = version;
    a.descriptor = j.at("descriptor").get<std::string>();
    const auto& v = j.at("vocabulary");
    const auto& df_bytes = v.at("df").get_binary();
    std::vector<std::uint32_t> df(df_bytes.size() / sizeof(std::uint32_t));
    if (df_bytes.size() % sizeof(std::uint32_t) != 0) {
      throw Error(ErrorCode::kFormatError, "ragged document frequencies");
    }
    if (!df.empty()) std::memcpy(df.data(), df_bytes.data(), df_bytes.size());
    a.vocabulary = text::Vocabulary::from_parts(
        v.at("terms").get<std::vector<std::string>>(), std::move(df),
        v.at("n_docs").get<std::uint32_t>());
    const auto words = j.at("stop_words").get<std::vector<std::string>>();
    a.stop_words = text::StopWords(words);
    a.model = classify::predictor_from_json(j.at("model"));
    if (a.model->dimension() != a.vocabulary.size()) {
      throw Error(ErrorCode::kFormatError,
                  "model dimension differs from the vocabulary size");
    }
    a.training_start = parse_month(j.at("training_start").get<std::string>());
    a.training_end = parse_month(j.at("training_end").get<std::string>());
    a.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    a.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
    a.seed = j.at("seed").get<std::uint64_t>();
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError,
                fmt::format("malformed artifact payload: {}", e.what()));
  }
}

void save_artifact(const std::filesystem::path& path,
                   const ModelArtifact& artifact) {
  const auto bytes = encode_artifact(artifact);
  auto temp = path;
  static std::atomic<unsigned> counter{0};
  temp += fmt::format(".tmp-{}-{}", ::getpid(), counter++);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(temp, ignored);
      throw Error(ErrorCode::kIoError,
                  fmt::format("cannot write '{}'", temp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot publish '{}'", path.string()));
  }
}

ModelArtifact load_artifact(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, fmt::format("cannot read '{}'", path.string()));
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_artifact(bytes);
}

ModelArtifact train_job(std::span<const corpus::IssueReport> reports,
                        Month as_of, const text::StopWords& stop_words,
                        const TrainJobConfig& config) {
  if (config.window_months < 1) {
    throw Error(ErrorCode::kInvalidInput, "training window must be positive");
  }
  const Month start = add_months(as_of, -config.window_months);
  const Month end = add_months(as_of, -1);
  const auto closed = corpus::filter_closed(reports);
  const auto slice = corpus::month_slice(closed, start, end);
  eval::LabeledData data;
  try {
    data = eval::build_training_set(slice.reports, stop_words);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyTrainingSet) throw;
    throw Error(ErrorCode::kNoTrainingData,
                fmt::format("no closed reports with text between {} and {}",
                            format_month(start), format_month(end)));
  }
  ModelArtifact a;
  a.model = classify::fit_spec(config.spec, data.X, data.y,
                               data.vocabulary.size(), config.fit);
  a.descriptor = a.model->describe();
  a.vocabulary = std::move(data.vocabulary);
  a.stop_words = stop_words;
  a.training_start = start;
  a.training_end = end;
  a.created_at = now_utc();
  a.corpus_fingerprint = corpus::fingerprint(slice.reports);
  a.seed = config.fit.seed;
  return a;
}

ModelArtifact train_job(const std::filesystem::path& corpus_path, Month as_of,
                        const text::StopWords& stop_words,
                        const std::filesystem::path& artifact_path,
                        const TrainJobConfig& config) {
  const auto loaded = corpus::load_corpus(corpus_path);
  auto artifact = train_job(loaded.reports, as_of, stop_words, config);
  save_artifact(artifact_path, artifact);
  return artifact;
}

}  // namespace triage::service
