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

// Compact binary encoding of numeric arrays inside JSON documents. Arrays
// are stored as little-endian byte strings so CBOR round-trips them
// bit-exactly and without per-element overhead.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include <json.hpp>

#include "triage/error.hpp"
#include "triage/textpipe.hpp"

namespace triage::classify::codec {

template <typename T>
nlohmann::json pack(std::span<const T> values) {
  static_assert(std::endian::native == std::endian::little,
                "artifact encoding assumes a little-endian host");
  std::vector<std::uint8_t> bytes(values.size() * sizeof(T));
  if (!values.empty()) std::memcpy(bytes.data(), values.data(), bytes.size());
  return nlohmann::json::binary(std::move(bytes));
}

template <typename T>
std::vector<T> unpack(const nlohmann::json& j) {
  if (!j.is_binary()) throw Error(ErrorCode::kFormatError, "expected binary array");
  const auto& bytes = j.get_binary();
  if (bytes.size() % sizeof(T) != 0) {
    throw Error(ErrorCode::kFormatError, "binary array has a ragged length");
  }
  std::vector<T> out(bytes.size() / sizeof(T));
  if (!out.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

inline nlohmann::json pack_rows(std::span<const text::SparseVector> rows) {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  for (const auto& row : rows) {
    for (const auto& e : row.entries()) {
      indices.push_back(e.index);
      values.push_back(e.weight);
    }
    offsets.push_back(static_cast<std::uint32_t>(indices.size()));
  }
  return {{"offsets", pack<std::uint32_t>(offsets)},
          {"indices", pack<std::uint32_t>(indices)},
          {"values", pack<double>(values)}};
}

inline std::vector<text::SparseVector> unpack_rows(const nlohmann::json& j) {
  const auto offsets = unpack<std::uint32_t>(j.at("offsets"));
  const auto indices = unpack<std::uint32_t>(j.at("indices"));
  const auto values = unpack<double>(j.at("values"));
  if (offsets.empty() || indices.size() != values.size() ||
      offsets.back() != indices.size()) {
    throw Error(ErrorCode::kFormatError, "inconsistent sparse rows");
  }
  std::vector<text::SparseVector> rows;
  rows.reserve(offsets.size() - 1);
  for (std::size_t r = 0; r + 1 < offsets.size(); ++r) {
    if (offsets[r] > offsets[r + 1]) {
      throw Error(ErrorCode::kFormatError, "inconsistent sparse rows");
    }
    std::vector<text::Entry> entries;
    for (std::uint32_t k = offsets[r]; k < offsets[r + 1]; ++k) {
      entries.push_back({indices[k], values[k]});
    }
    rows.emplace_back(std::move(entries));
  }
  return rows;
}

}  // namespace triage::classify::codec
