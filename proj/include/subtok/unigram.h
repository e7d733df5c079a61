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

#ifndef SUBTOK_UNIGRAM_H_
#define SUBTOK_UNIGRAM_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
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

// U+2581, marks a word start in raw text.
inline constexpr std::string_view kWordBoundary = "\xE2\x96\x81";

// Piece -> natural-log probability. Single-character pieces are protected
// from pruning. The model does not force normalization: callers that need
// it (training) check probability_mass().
class UnigramModel {
 public:
  UnigramModel() = default;
  explicit UnigramModel(std::vector<std::pair<std::string, double>> pieces);

  std::size_t size() const { return log_probs_.size(); }
  bool contains(std::string_view piece) const { return log_probs_.contains(piece); }
  // Log-probability of a piece; throws InputError when absent.
  double log_prob(std::string_view piece) const;
  const double* find(std::string_view piece) const;
  bool is_protected(std::string_view piece) const;
  // Longest piece, in code points.
  std::size_t max_piece_chars() const { return max_piece_chars_; }

  // Sorted by descending log-probability, then piece.
  std::vector<std::pair<std::string, double>> pieces() const;
  std::size_t protected_count() const { return protected_count_; }
  // Sum of exp(log-prob) over all pieces.
  double probability_mass() const;

  // TSV with header "#unigram v1 boundary=▁", then "PIECE<TAB>LOG_PROB"
  // written with 17 significant digits.
  void save(std::ostream& out) const;
  static UnigramModel load(std::istream& in);
  static UnigramModel load(const std::filesystem::path& path);

 private:
  StringMap<double> log_probs_;
  std::size_t max_piece_chars_ = 0;
  std::size_t protected_count_ = 0;
};

// Candidate pieces with raw corpus counts; all characters come first.
struct SeedVocabulary {
  std::vector<std::pair<std::string, std::uint64_t>> pieces;
  std::size_t char_count = 0;
};

// Collects every character plus the (seed_size - #chars) most frequent
// substrings of 2..max_piece_len code points. `units` maps text units to
// their frequency; substrings never cross whitespace inside a unit.
// Throws InputError on an empty corpus or when seed_size < #chars.
SeedVocabulary extract_seed(const TokenFrequencyTable& units, std::size_t seed_size,
                            std::size_t max_piece_len);
SeedVocabulary extract_seed(std::span<const std::string> texts, std::size_t seed_size,
                            std::size_t max_piece_len);

struct ExpectedCounts {
  StringMap<double> counts;
  double log_marginal = 0.0;
};

// Forward-backward over the segmentation lattice of `text`.
// Throws UncoveredCharacterError if no segmentation exists.
ExpectedCounts expected_counts(const UnigramModel& model, std::string_view text);

// log p(x) = log count(x) - log sum(counts), over the positive counts.
// Throws InputError if no count is positive.
std::vector<std::pair<std::string, double>> m_step(const StringMap<double>& accumulated);
std::vector<std::pair<std::string, double>> m_step(const std::map<std::string, double>& accumulated);

// Max-probability segmentation. Ties go to fewer pieces, then to the
// lexicographically smallest piece sequence. `excluded` is a piece that may
// not be used (empty for none). Throws UncoveredCharacterError.
std::vector<std::string> viterbi_segment(const UnigramModel& model, std::string_view text,
                                         std::string_view excluded = {});

// Scores above this absolute/relative gap count as different; within it,
// the tie rules decide.
inline constexpr double kScoreTieEpsilon = 1e-12;

// One pruning round. Drops the multi-character pieces whose removal costs
// the least corpus Viterbi log-likelihood until
// max(target_size, ceil(shrink_factor * size)) pieces remain, then
// renormalizes. `units` is the training corpus (unit -> frequency).
UnigramModel prune(const UnigramModel& model, const TokenFrequencyTable& units,
                   std::size_t target_size, double shrink_factor);

struct UnigramTrainConfig {
  // 0 selects min(8 * vocab_size, 1'000'000).
  std::size_t seed_size = 0;
  std::size_t max_piece_len = 16;
  double shrink_factor = 0.75;
  int em_iterations = 2;
  int threads = 1;
};

struct EmStep {
  int round = 0;
  int iteration = 0;
  std::size_t pieces = 0;
  double log_marginal = 0.0;  // corpus log-likelihood under the E-step model
  double mass_after = 0.0;    // probability mass after the M-step
};

struct UnigramTrainTrace {
  std::size_t seed_size = 0;
  std::vector<EmStep> em_steps;
  std::vector<std::size_t> sizes_after_prune;
  std::vector<double> mass_after_prune;
};

// Boundary-marked text units for unigram training: each whitespace token
// becomes "▁token". Throws InputError if the input already contains ▁.
TokenFrequencyTable unigram_training_units(std::span<const std::string> sentences);

// Seed extraction, then rounds of EM sub-iterations and pruning until the
// model holds at most vocab_size pieces, followed by a final EM round.
UnigramModel train_unigram(std::span<const std::string> sentences, std::size_t vocab_size,
                           const UnigramTrainConfig& config = {},
                           UnigramTrainTrace* trace = nullptr);
UnigramModel train_unigram_units(const TokenFrequencyTable& units, std::size_t vocab_size,
                                 const UnigramTrainConfig& config = {},
                                 UnigramTrainTrace* trace = nullptr);

// "a b" -> "▁a▁b".
std::string mark_boundaries(std::string_view sentence);

// Segments a raw sentence word by word (pieces never cross words).
std::vector<std::string> encode_unigram(const UnigramModel& model, std::string_view sentence);
// Joins pieces and turns boundary marks back into spaces.
std::string decode_unigram(std::span<const std::string> pieces);

}  // namespace subtok

#endif  // SUBTOK_UNIGRAM_H_
