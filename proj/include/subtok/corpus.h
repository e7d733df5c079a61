// Copyright 2026 The subtok Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBTOK_CORPUS_H_
#define SUBTOK_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subtok/string_map.h"

namespace subtok {

// Text cleanup applied to every input line before it becomes a sentence.
struct NormalizationConfig {
  // Cap in code points. Longer sentences are truncated, not dropped.
  std::size_t max_sentence_length = 16384;
  bool lowercase = false;
  bool collapse_whitespace = true;
  // Unicode NFKC, applied before everything else.
  bool nfkc = false;
};

enum class InputMode {
  kRaw,           // sentences are untokenised text
  kPretokenised,  // tokens separated by a single U+0020, each one atomic
};

// Strips leading/trailing whitespace, optionally collapses internal runs
// to one space, lowercases, and truncates at max_sentence_length.
// Idempotent.
std::string normalize(std::string_view text, const NormalizationConfig& config = {});

// Splits on runs of ASCII whitespace, dropping empty fields.
std::vector<std::string_view> split_whitespace(std::string_view text);

// Reads one sentence per line from a text source. Blank lines (after
// normalization) are skipped. Single consumer; not restartable.
class SentenceStream {
 public:
  SentenceStream(std::istream& in, NormalizationConfig config, InputMode mode);

  // Opens `path`, throwing InputError naming the path when it is missing.
  static SentenceStream open(const std::filesystem::path& path,
                             NormalizationConfig config, InputMode mode);

  SentenceStream(SentenceStream&&) noexcept;
  SentenceStream& operator=(SentenceStream&&) noexcept;
  ~SentenceStream();

  // Next normalized, non-empty sentence; nullopt at end of input.
  // Throws Error carrying the line number on a read failure.
  std::optional<std::string> next();

  // Tokens of a sentence produced by this stream (whitespace split in both
  // modes; in pretokenised mode each field is taken verbatim).
  static std::vector<std::string_view> tokens(std::string_view sentence);

  // Drains the stream.
  std::vector<std::string> read_all();

  InputMode mode() const { return mode_; }
  std::size_t line_number() const { return line_; }

 private:
  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_;
  NormalizationConfig config_;
  InputMode mode_;
  std::size_t line_ = 0;
};

// token/piece -> count. Never stores zero counts.
class TokenFrequencyTable {
 public:
  void add(std::string_view token, std::uint64_t count = 1);
  // Order-independent: merging A into B and B into A yields equal tables.
  void merge(const TokenFrequencyTable& other);

  std::uint64_t count(std::string_view token) const;
  std::uint64_t total_count() const { return total_; }
  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }

  // Entries by descending count, then ascending token.
  std::vector<std::pair<std::string, std::uint64_t>> sorted() const;

  const StringMap<std::uint64_t>& entries() const { return counts_; }

  bool operator==(const TokenFrequencyTable& other) const = default;

  // "TOKEN<TAB>COUNT" lines, sorted().
  void save(std::ostream& out) const;
  static TokenFrequencyTable load(std::istream& in);

 private:
  StringMap<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

TokenFrequencyTable count_words(std::span<const std::string> sentences);
TokenFrequencyTable count_words(SentenceStream& stream);

struct CorpusStats {
  std::uint64_t sentence_count = 0;
  std::uint64_t token_count = 0;
  bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(std::span<const std::string> sentences);
CorpusStats corpus_stats(SentenceStream& stream);

}  // namespace subtok

#endif  // SUBTOK_CORPUS_H_
