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

#include "subtok/corpus.h"

#include <algorithm>
#include <charconv>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "subtok/error.h"
#include "subtok/utf8.h"

namespace subtok {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_nfkc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw Error("NFKC normalizer unavailable");
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString dst = nfkc->normalize(src, status);
  if (U_FAILURE(status)) throw Error("NFKC normalization failed");
  std::string out;
  dst.toUTF8String(out);
  return out;
}

std::string to_lower(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s.toLower(icu::Locale::getRoot());
  std::string out;
  s.toUTF8String(out);
  return out;
}

}  // namespace

std::string normalize(std::string_view text, const NormalizationConfig& config) {
  std::string buffer;
  if (config.nfkc) {
    buffer = to_nfkc(text);
    text = buffer;
  }
  text = trim(text);

  std::string out;
  out.reserve(text.size());
  if (config.collapse_whitespace) {
    bool in_space = false;
    for (char c : text) {
      if (is_space(c)) {
        in_space = true;
        continue;
      }
      if (in_space) out.push_back(' ');
      in_space = false;
      out.push_back(c);
    }
  } else {
    out.assign(text);
  }
  if (config.lowercase) out = to_lower(out);

  out.resize(utf8::prefix(out, std::max<std::size_t>(config.max_sentence_length, 1)).size());
  // Truncation may expose trailing whitespace.
  while (!out.empty() && is_space(out.back())) out.pop_back();
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

SentenceStream::SentenceStream(std::istream& in, NormalizationConfig config, InputMode mode)
    : in_(&in), config_(config), mode_(mode) {}

SentenceStream SentenceStream::open(const std::filesystem::path& path,
                                    NormalizationConfig config, InputMode mode) {
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!file->is_open()) {
    throw InputError("cannot open corpus file: " + path.string());
  }
  SentenceStream stream(*file, config, mode);
  stream.owned_ = std::move(file);
  return stream;
}

SentenceStream::SentenceStream(SentenceStream&&) noexcept = default;
SentenceStream& SentenceStream::operator=(SentenceStream&&) noexcept = default;
SentenceStream::~SentenceStream() = default;

std::optional<std::string> SentenceStream::next() {
  std::string line;
  while (std::getline(*in_, line)) {
    ++line_;
    std::string sentence = normalize(line, config_);
    if (!sentence.empty()) return sentence;
  }
  if (in_->bad()) {
    throw Error("read failure at line " + std::to_string(line_ + 1));
  }
  return std::nullopt;
}

std::vector<std::string_view> SentenceStream::tokens(std::string_view sentence) {
  return split_whitespace(sentence);
}

std::vector<std::string> SentenceStream::read_all() {
  std::vector<std::string> out;
  while (auto s = next()) out.push_back(std::move(*s));
  return out;
}

void TokenFrequencyTable::add(std::string_view token, std::uint64_t count) {
  if (count == 0) return;
  auto it = counts_.find(token);
  if (it == counts_.end()) {
    counts_.emplace(std::string(token), count);
  } else {
    it->second += count;
  }
  total_ += count;
}

void TokenFrequencyTable::merge(const TokenFrequencyTable& other) {
  for (const auto& [token, count] : other.counts_) add(token, count);
}

std::uint64_t TokenFrequencyTable::count(std::string_view token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, std::uint64_t>> TokenFrequencyTable::sorted() const {
  std::vector<std::pair<std::string, std::uint64_t>> out(counts_.begin(), counts_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

void TokenFrequencyTable::save(std::ostream& out) const {
  for (const auto& [token, count] : sorted()) out << token << '\t' << count << '\n';
}

TokenFrequencyTable TokenFrequencyTable::load(std::istream& in) {
  TokenFrequencyTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    std::uint64_t count = 0;
    if (tab == std::string::npos) {
      throw InputError("malformed count line " + std::to_string(line_no));
    }
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last) {
      throw InputError("malformed count on line " + std::to_string(line_no));
    }
    table.add(std::string_view(line).substr(0, tab), count);
  }
  return table;
}

TokenFrequencyTable count_words(std::span<const std::string> sentences) {
  TokenFrequencyTable table;
  for (const auto& s : sentences) {
    for (auto token : SentenceStream::tokens(s)) table.add(token);
  }
  return table;
}

TokenFrequencyTable count_words(SentenceStream& stream) {
  TokenFrequencyTable table;
  while (auto s = stream.next()) {
    for (auto token : SentenceStream::tokens(*s)) table.add(token);
  }
  return table;
}

CorpusStats corpus_stats(std::span<const std::string> sentences) {
  CorpusStats stats;
  for (const auto& s : sentences) {
    ++stats.sentence_count;
    stats.token_count += SentenceStream::tokens(s).size();
  }
  return stats;
}

CorpusStats corpus_stats(SentenceStream& stream) {
  CorpusStats stats;
  while (auto s = stream.next()) {
    ++stats.sentence_count;
    stats.token_count += SentenceStream::tokens(*s).size();
  }
  return stats;
}

}  // namespace subtok
