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

#ifndef SUBTOK_BPE_H_
#define SUBTOK_BPE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subtok/corpus.h"
#include "subtok/string_map.h"

namespace subtok {

inline constexpr std::string_view kEndOfWord = "</w>";

struct MergeRule {
  std::string left;
  std::string right;
  int rank = 0;  // 0-based; lower ranks apply first
  bool operator==(const MergeRule&) const = default;
};

// Current symbol sequence and frequency of each training word.
using WordReps = std::map<std::string, std::pair<std::vector<std::string>, std::uint64_t>>;
using PairCounts = std::map<std::pair<std::string, std::string>, std::uint64_t>;

// Frequency-weighted count of every adjacent symbol pair. Each adjacent
// position counts, so [a, a, a] contributes 2 to (a, a).
PairCounts pair_counts(const WordReps& words);

// Byte-pair encoding model: initial character symbols plus ordered merges.
// Immutable once built; encode() is safe to call concurrently.
class BpeModel {
 public:
  BpeModel() = default;
  BpeModel(std::vector<std::string> initial_symbols, std::vector<MergeRule> merges,
           std::string eow = std::string(kEndOfWord));

  const std::string& eow() const { return eow_; }
  // Sorted; contains the end-of-word marker.
  const std::vector<std::string>& initial_symbols() const { return initial_; }
  const std::vector<MergeRule>& merges() const { return merges_; }

  // Initial symbols followed by one new symbol per merge, in rank order.
  std::vector<std::string> vocabulary() const;
  std::size_t vocab_size() const { return initial_.size() + merges_.size(); }

  // Characters of `word` plus the marker, merged in rank order, each merge
  // applied to every occurrence leftmost-first. `max_merges` limits the
  // model to its first k rules. Throws InputError if the word contains the
  // marker.
  std::vector<std::string> encode(std::string_view word,
                                  std::size_t max_merges = SIZE_MAX) const;

  // Merges file: header "#bpe v1 eow=<marker>" then "LEFT<TAB>RIGHT" per rank.
  void save_merges(std::ostream& out) const;
  // Vocabulary file: "SYMBOL<TAB>RANK" in vocabulary() order.
  void save_vocab(std::ostream& out) const;
  // Reads a merges file; initial symbols come from `vocab` when given,
  // otherwise they are rebuilt from the characters that appear in merges.
  static BpeModel load(std::istream& merges, std::istream* vocab = nullptr);
  static BpeModel load(const std::filesystem::path& merges_path);

 private:
  std::vector<std::string> initial_;
  std::vector<MergeRule> merges_;
  std::string eow_ = std::string(kEndOfWord);
  // "LEFT\0RIGHT" -> rank
  StringMap<int> ranks_;
};

struct BpeTrainOptions {
  std::string eow = std::string(kEndOfWord);
  // Training stops once the best pair occurs fewer times than this.
  std::uint64_t min_pair_count = 2;
};

struct BpeTrainLog {
  std::size_t merges_requested = 0;
  std::size_t merges_performed = 0;
  bool stopped_early = false;
  std::string stop_reason;
  // Pairs whose concatenation already existed as a symbol and were skipped.
  std::size_t skipped_duplicate_pairs = 0;
};

// Learns up to `num_merges` merges from a word-frequency table. Ties between
// equally frequent pairs go to the lexicographically smallest (left, right).
// Throws InputError("empty corpus") for an empty table.
BpeModel train_bpe(const TokenFrequencyTable& freqs, std::size_t num_merges,
                   const BpeTrainOptions& options = {}, BpeTrainLog* log = nullptr);

// Word-frequency table for BPE training. With `sentence_as_word`, each full
// sentence is one "word" (for scripts without spaces).
TokenFrequencyTable bpe_training_words(std::span<const std::string> sentences,
                                       bool sentence_as_word);

std::vector<std::string> encode_bpe(const BpeModel& model, std::string_view word);

// Concatenation of per-word encodings.
std::vector<std::string> tokenize_sentence_bpe(const BpeModel& model,
                                                std::span<const std::string_view> words);

// Inverse of tokenize_sentence_bpe: words joined by single spaces.
std::string decode_bpe(const BpeModel& model, std::span<const std::string> pieces);

}  // namespace subtok

#endif  // SUBTOK_BPE_H_
