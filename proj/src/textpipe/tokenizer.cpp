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
#include <fstream>

#include <fmt/format.h>
#include <unicode/uchar.h>

#include "triage/error.hpp"
#include "triage/textpipe.hpp"

namespace triage::text {
namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at `pos` and advances it. Returns kInvalid
// (consuming a single byte) on malformed or overlong input.
char32_t next_code_point(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(s[i]);
  };
  const unsigned char lead = byte(pos);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((lead & 0xE0) == 0xC0) {
    len = 2; cp = lead & 0x1F; min = 0x80;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3; cp = lead & 0x0F; min = 0x800;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4; cp = lead & 0x07; min = 0x10000;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kInvalid;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const unsigned char c = byte(pos + i);
    if ((c & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kInvalid;
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_letter(char32_t cp) {
  return cp != kInvalid &&
         (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_L_MASK) != 0;
}

// Splits without stop-word filtering; shared by tokenize() and the
// stop-word loader so both see identically folded terms.
std::vector<std::string> fold_and_split(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = next_code_point(text, pos);
    if (is_letter(cp)) {
      append_utf8(current, static_cast<char32_t>(
                               u_foldCase(static_cast<UChar32>(cp),
                                          U_FOLD_CASE_DEFAULT)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// A compact general-purpose English list.
constexpr const char* kEnglishStopWords[] = {
    "a",       "about",   "above",  "after",  "again",   "against", "all",
    "am",      "an",      "and",    "any",    "are",     "as",      "at",
    "be",      "because", "been",   "before", "being",   "below",   "between",
    "both",    "but",     "by",     "can",    "could",   "did",     "do",
    "does",    "doing",   "down",   "during", "each",    "few",     "for",
    "from",    "further", "had",    "has",    "have",    "having",  "he",
    "her",     "here",    "hers",   "herself", "him",    "himself", "his",
    "how",     "i",       "if",     "in",     "into",    "is",      "it",
    "its",     "itself",  "just",   "me",     "more",    "most",    "my",
    "myself",  "no",      "nor",    "not",    "now",     "of",      "off",
    "on",      "once",    "only",   "or",     "other",   "our",     "ours",
    "ourselves", "out",   "over",   "own",    "same",    "she",     "should",
    "so",      "some",    "such",   "than",   "that",    "the",     "their",
    "theirs",  "them",    "themselves", "then", "there", "these",   "they",
    "this",    "those",   "through", "to",    "too",     "under",   "until",
    "up",      "very",    "was",    "we",     "were",    "what",    "when",
    "where",   "which",   "while",  "who",    "whom",    "why",     "will",
    "with",    "would",   "you",    "your",   "yours",   "yourself",
    "yourselves",
};

}  // namespace

StopWords::StopWords(std::span<const std::string> words) {
  for (const auto& word : words) {
    for (auto& term : fold_and_split(word)) words_.insert(std::move(term));
  }
}

StopWords StopWords::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot read stop-word file '{}'", path.string()));
  }
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) words.emplace_back(trim(line));
  }
  return StopWords(words);
}

StopWords StopWords::english() {
  std::vector<std::string> words(std::begin(kEnglishStopWords),
                                 std::end(kEnglishStopWords));
  return StopWords(words);
}

bool StopWords::contains(std::string_view term) const {
  return words_.find(std::string(term)) != words_.end();
}

std::vector<std::string> StopWords::words() const {
  std::vector<std::string> out(words_.begin(), words_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> tokenize(std::string_view text,
                                  const StopWords& stop_words) {
  std::vector<std::string> tokens = fold_and_split(text);
  std::erase_if(tokens,
                [&](const std::string& t) { return stop_words.contains(t); });
  return tokens;
}

std::vector<std::string> preprocess(const corpus::IssueReport& report,
                                    const StopWords& stop_words) {
  std::string text;
  text.reserve(report.summary.size() + 1 + report.description.size());
  text += report.summary;
  text += ' ';
  text += report.description;
  return tokenize(text, stop_words);
}

}  // namespace triage::text
