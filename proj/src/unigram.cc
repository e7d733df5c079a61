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

#include "subtok/unigram.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "subtok/error.h"
#include "subtok/utf8.h"

namespace subtok {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::string_view kModelHeader = "#unigram v1 boundary=";

double log_add(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

bool scores_tie(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kScoreTieEpsilon * scale;
}

struct Edge {
  std::size_t begin;
  std::size_t end;
  std::string_view piece;
  double log_prob;
};

// Edges grouped by start position; nodes are code point boundaries.
struct Lattice {
  std::size_t nodes = 0;  // number of characters
  std::vector<std::vector<Edge>> starting_at;
};

Lattice build_lattice(const UnigramModel& model, std::string_view text,
                      std::string_view excluded = {}) {
  const auto offsets = utf8::char_offsets(text);
  Lattice lattice;
  lattice.nodes = offsets.size() - 1;
  lattice.starting_at.resize(lattice.nodes);
  const std::size_t max_len = model.max_piece_chars();
  for (std::size_t i = 0; i < lattice.nodes; ++i) {
    const std::size_t last = std::min(lattice.nodes, i + max_len);
    for (std::size_t j = i + 1; j <= last; ++j) {
      const auto piece = text.substr(offsets[i], offsets[j] - offsets[i]);
      if (!excluded.empty() && piece == excluded) continue;
      if (const double* lp = model.find(piece)) {
        lattice.starting_at[i].push_back({i, j, piece, *lp});
      }
    }
  }
  return lattice;
}

[[noreturn]] void throw_uncovered(std::string_view text) {
  throw UncoveredCharacterError("uncovered character in \"" + std::string(text) + "\"");
}

// Adds weight * E[count(p)] into `acc`; returns the log-marginal.
double accumulate_expected(const UnigramModel& model, std::string_view text, double weight,
                           StringMap<double>& acc) {
  if (text.empty()) return 0.0;
  const Lattice lattice = build_lattice(model, text);
  const std::size_t n = lattice.nodes;

  std::vector<double> alpha(n + 1, kNegInf);
  alpha[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == kNegInf) continue;
    for (const auto& e : lattice.starting_at[i]) {
      alpha[e.end] = log_add(alpha[e.end], alpha[i] + e.log_prob);
    }
  }
  if (alpha[n] == kNegInf) throw_uncovered(text);

  std::vector<double> beta(n + 1, kNegInf);
  beta[n] = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    for (const auto& e : lattice.starting_at[i]) {
      beta[i] = log_add(beta[i], e.log_prob + beta[e.end]);
    }
  }

  const double z = alpha[n];
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == kNegInf) continue;
    for (const auto& e : lattice.starting_at[i]) {
      if (beta[e.end] == kNegInf) continue;
      const double posterior = std::exp(alpha[i] + e.log_prob + beta[e.end] - z);
      if (posterior == 0.0) continue;
      auto it = acc.find(e.piece);
      if (it == acc.end()) {
        acc.emplace(std::string(e.piece), weight * posterior);
      } else {
        it->second += weight * posterior;
      }
    }
  }
  return z;
}

struct ViterbiCell {
  double score = kNegInf;
  std::size_t pieces = 0;
  const Edge* first = nullptr;
};

std::vector<std::string> viterbi_impl(const UnigramModel& model, std::string_view text,
                                      std::string_view excluded, double* score_out) {
  if (text.empty()) {
    if (score_out) *score_out = 0.0;
    return {};
  }
  const Lattice lattice = build_lattice(model, text, excluded);
  const std::size_t n = lattice.nodes;

  // Best segmentation of each suffix. Comparing (score, piece count, first
  // piece) is enough for a total lexicographic order on whole sequences:
  // equal first pieces share the same suffix.
  std::vector<ViterbiCell> best(n + 1);
  best[n].score = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    auto& cell = best[i];
    for (const auto& e : lattice.starting_at[i]) {
      const auto& rest = best[e.end];
      if (rest.score == kNegInf) continue;
      const double score = e.log_prob + rest.score;
      const std::size_t pieces = rest.pieces + 1;
      bool better = false;
      if (cell.first == nullptr) {
        better = true;
      } else if (!scores_tie(score, cell.score)) {
        better = score > cell.score;
      } else if (pieces != cell.pieces) {
        better = pieces < cell.pieces;
      } else {
        better = e.piece < cell.first->piece;
      }
      if (better) cell = {score, pieces, &e};
    }
  }
  if (best[0].first == nullptr) throw_uncovered(text);

  std::vector<std::string> out;
  out.reserve(best[0].pieces);
  for (std::size_t i = 0; i < n;) {
    const Edge* e = best[i].first;
    out.emplace_back(e->piece);
    i = e->end;
  }
  if (score_out) *score_out = best[0].score;
  return out;
}

std::vector<std::pair<std::string, double>> normalize_counts(
    std::vector<std::pair<std::string, double>> counts) {
  double total = 0.0;
  for (const auto& [piece, c] : counts) {
    if (c > 0.0) total += c;
  }
  if (!(total > 0.0)) throw InputError("m-step needs at least one positive count");
  const double log_total = std::log(total);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(counts.size());
  for (auto& [piece, c] : counts) {
    if (c > 0.0) out.emplace_back(std::move(piece), std::log(c) - log_total);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

UnigramModel::UnigramModel(std::vector<std::pair<std::string, double>> pieces) {
  log_probs_.reserve(pieces.size());
  for (auto& [piece, lp] : pieces) {
    if (piece.empty()) throw InputError("empty unigram piece");
    if (std::isnan(lp)) throw InputError("NaN log-probability for piece " + piece);
    const std::size_t chars = utf8::char_count(piece);
    if (!log_probs_.emplace(std::move(piece), lp).second) {
      throw InputError("duplicate unigram piece");
    }
    max_piece_chars_ = std::max(max_piece_chars_, chars);
    if (chars == 1) ++protected_count_;
  }
}

const double* UnigramModel::find(std::string_view piece) const {
  auto it = log_probs_.find(piece);
  return it == log_probs_.end() ? nullptr : &it->second;
}

double UnigramModel::log_prob(std::string_view piece) const {
  if (const double* lp = find(piece)) return *lp;
  throw InputError("unknown piece: " + std::string(piece));
}

bool UnigramModel::is_protected(std::string_view piece) const {
  return contains(piece) && utf8::is_single_char(piece);
}

std::vector<std::pair<std::string, double>> UnigramModel::pieces() const {
  std::vector<std::pair<std::string, double>> out(log_probs_.begin(), log_probs_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

double UnigramModel::probability_mass() const {
  double mass = 0.0;
  for (const auto& [piece, lp] : log_probs_) mass += std::exp(lp);
  return mass;
}

void UnigramModel::save(std::ostream& out) const {
  out << kModelHeader << kWordBoundary << '\n';
  char buf[64];
  for (const auto& [piece, lp] : pieces()) {
    std::snprintf(buf, sizeof(buf), "%.17g", lp);
    out << piece << '\t' << buf << '\n';
  }
}

UnigramModel UnigramModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kModelHeader)) {
    throw InputError("not a unigram model file (missing '#unigram v1' header)");
  }
  std::vector<std::pair<std::string, double>> pieces;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    double lp = 0.0;
    if (tab == std::string::npos) {
      throw InputError("malformed unigram line " + std::to_string(line_no));
    }
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(line.data() + tab + 1, last, lp);
    if (ec != std::errc() || ptr != last) {
      throw InputError("malformed log-probability on line " + std::to_string(line_no));
    }
    pieces.emplace_back(line.substr(0, tab), lp);
  }
  return UnigramModel(std::move(pieces));
}

UnigramModel UnigramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open unigram model: " + path.string());
  return load(in);
}

SeedVocabulary extract_seed(const TokenFrequencyTable& units, std::size_t seed_size,
                            std::size_t max_piece_len) {
  if (units.empty()) throw InputError("empty corpus");
  StringMap<std::uint64_t> chars;
  StringMap<std::uint64_t> substrings;
  for (const auto& [unit, freq] : units.entries()) {
    for (auto segment : split_whitespace(unit)) {
      const auto offsets = utf8::char_offsets(segment);
      const std::size_t n = offsets.size() - 1;
      for (std::size_t i = 0; i < n; ++i) {
        chars[std::string(segment.substr(offsets[i], offsets[i + 1] - offsets[i]))] += freq;
        const std::size_t last = std::min(n, i + max_piece_len);
        for (std::size_t j = i + 2; j <= last; ++j) {
          const auto sub = segment.substr(offsets[i], offsets[j] - offsets[i]);
          auto it = substrings.find(sub);
          if (it == substrings.end()) {
            substrings.emplace(std::string(sub), freq);
          } else {
            it->second += freq;
          }
        }
      }
    }
  }
  if (chars.empty()) throw InputError("empty corpus");
  if (seed_size < chars.size()) {
    throw InputError("seed size " + std::to_string(seed_size) + " is below the " +
                     std::to_string(chars.size()) + " distinct characters");
  }

  auto by_count = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  SeedVocabulary seed;
  seed.pieces.assign(chars.begin(), chars.end());
  std::sort(seed.pieces.begin(), seed.pieces.end(), by_count);
  seed.char_count = seed.pieces.size();

  std::vector<std::pair<std::string, std::uint64_t>> subs(substrings.begin(), substrings.end());
  const std::size_t room = std::min(seed_size - seed.char_count, subs.size());
  std::partial_sort(subs.begin(), subs.begin() + static_cast<std::ptrdiff_t>(room), subs.end(),
                    by_count);
  seed.pieces.insert(seed.pieces.end(), std::make_move_iterator(subs.begin()),
                     std::make_move_iterator(subs.begin() + static_cast<std::ptrdiff_t>(room)));
  return seed;
}

SeedVocabulary extract_seed(std::span<const std::string> texts, std::size_t seed_size,
                            std::size_t max_piece_len) {
  TokenFrequencyTable units;
  for (const auto& t : texts) units.add(t);
  return extract_seed(units, seed_size, max_piece_len);
}

ExpectedCounts expected_counts(const UnigramModel& model, std::string_view text) {
  ExpectedCounts out;
  out.log_marginal = accumulate_expected(model, text, 1.0, out.counts);
  return out;
}

std::vector<std::pair<std::string, double>> m_step(const StringMap<double>& accumulated) {
  return normalize_counts({accumulated.begin(), accumulated.end()});
}

std::vector<std::pair<std::string, double>> m_step(
    const std::map<std::string, double>& accumulated) {
  return normalize_counts({accumulated.begin(), accumulated.end()});
}

std::vector<std::string> viterbi_segment(const UnigramModel& model, std::string_view text,
                                         std::string_view excluded) {
  return viterbi_impl(model, text, excluded, nullptr);
}

UnigramModel prune(const UnigramModel& model, const TokenFrequencyTable& units,
                   std::size_t target_size, double shrink_factor) {
  if (!(shrink_factor > 0.0 && shrink_factor < 1.0)) {
    throw InputError("shrink factor must lie in (0, 1)");
  }
  if (target_size < model.protected_count()) {
    throw InputError("target size " + std::to_string(target_size) + " is below the " +
                     std::to_string(model.protected_count()) + " protected characters");
  }
  const std::size_t size = model.size();
  const auto shrunk =
      static_cast<std::size_t>(std::ceil(shrink_factor * static_cast<double>(size)));
  const std::size_t keep = std::max(target_size, shrunk);
  if (keep >= size) return model;

  StringMap<double> usage;
  for (const auto& [unit, freq] : units.entries()) {
    std::vector<std::string> pieces;
    try {
      pieces = viterbi_segment(model, unit);
    } catch (const UncoveredCharacterError&) {
      continue;
    }
    for (auto& p : pieces) usage[std::move(p)] += static_cast<double>(freq);
  }

  struct Candidate {
    double loss;
    double log_prob;
    std::string piece;
  };
  std::vector<Candidate> candidates;
  for (const auto& [piece, lp] : model.pieces()) {
    if (model.is_protected(piece)) continue;
    auto it = usage.find(piece);
    double loss = 0.0;
    if (it != usage.end()) {
      double alt = 0.0;
      for (const auto& q : viterbi_segment(model, piece, piece)) alt += model.log_prob(q);
      loss = it->second * (lp - alt);
    }
    candidates.push_back({loss, lp, piece});
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    if (a.log_prob != b.log_prob) return a.log_prob < b.log_prob;
    return a.piece < b.piece;
  });

  const std::size_t drop = std::min(size - keep, candidates.size());
  StringSet removed;
  for (std::size_t i = 0; i < drop; ++i) removed.insert(candidates[i].piece);

  std::vector<std::pair<std::string, double>> kept;
  double log_z = kNegInf;
  for (auto& [piece, lp] : model.pieces()) {
    if (removed.contains(piece)) continue;
    log_z = log_add(log_z, lp);
    kept.emplace_back(piece, lp);
  }
  for (auto& [piece, lp] : kept) lp -= log_z;
  return UnigramModel(std::move(kept));
}

std::string mark_boundaries(std::string_view sentence) {
  if (sentence.find(kWordBoundary) != std::string_view::npos) {
    throw InputError("reserved boundary marker in input");
  }
  std::string out;
  for (auto word : split_whitespace(sentence)) {
    out.append(kWordBoundary);
    out.append(word);
  }
  return out;
}

TokenFrequencyTable unigram_training_units(std::span<const std::string> sentences) {
  TokenFrequencyTable units;
  std::string unit;
  for (const auto& s : sentences) {
    if (s.find(kWordBoundary) != std::string::npos) {
      throw InputError("reserved boundary marker in input");
    }
    for (auto word : split_whitespace(s)) {
      unit.assign(kWordBoundary);
      unit.append(word);
      units.add(unit);
    }
  }
  return units;
}

namespace {

struct EStepResult {
  StringMap<double> counts;
  double log_marginal = 0.0;
};

EStepResult run_e_step(const UnigramModel& model,
                       const std::vector<std::pair<std::string, std::uint64_t>>& units,
                       int threads) {
  const std::size_t shards =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, units.size());
  std::vector<EStepResult> partial(shards);
  auto work = [&](std::size_t shard) {
    auto& out = partial[shard];
    for (std::size_t u = shard; u < units.size(); u += shards) {
      const double w = static_cast<double>(units[u].second);
      out.log_marginal += w * accumulate_expected(model, units[u].first, w, out.counts);
    }
  };
  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t s = 0; s < shards; ++s) pool.emplace_back(work, s);
    for (auto& t : pool) t.join();
  }
  // Fixed shard order keeps the sum reproducible for a given thread count.
  EStepResult total = std::move(partial[0]);
  for (std::size_t s = 1; s < shards; ++s) {
    total.log_marginal += partial[s].log_marginal;
    for (auto& [piece, c] : partial[s].counts) total.counts[piece] += c;
  }
  return total;
}

}  // namespace

UnigramModel train_unigram_units(const TokenFrequencyTable& units, std::size_t vocab_size,
                                 const UnigramTrainConfig& config, UnigramTrainTrace* trace) {
  if (units.empty()) throw InputError("empty corpus");
  if (config.em_iterations < 1) throw InputError("need at least one EM iteration");

  StringSet chars;
  for (const auto& [unit, freq] : units.entries()) {
    for (auto c : utf8::split_chars(unit)) {
      if (c != " " && c != "\t") chars.emplace(c);
    }
  }
  if (vocab_size < chars.size()) {
    throw InputError("vocabulary size " + std::to_string(vocab_size) + " is below the " +
                     std::to_string(chars.size()) + " distinct characters");
  }
  std::size_t seed_size = config.seed_size;
  if (seed_size == 0) seed_size = std::min<std::size_t>(8 * vocab_size, 1'000'000);
  seed_size = std::max(seed_size, chars.size());

  const SeedVocabulary seed = extract_seed(units, seed_size, config.max_piece_len);
  StringMap<double> seed_counts;
  for (const auto& [piece, count] : seed.pieces) seed_counts[piece] = static_cast<double>(count);
  UnigramModel model(m_step(seed_counts));

  UnigramTrainTrace local;
  local.seed_size = seed.pieces.size();
  const auto sorted_units = units.sorted();

  for (int round = 0;; ++round) {
    for (int it = 0; it < config.em_iterations; ++it) {
      EStepResult e = run_e_step(model, sorted_units, config.threads);
      // Characters must survive even if their expected count underflows.
      for (const auto& c : chars) {
        auto& slot = e.counts[c];
        if (!(slot > 0.0)) slot = std::numeric_limits<double>::min();
      }
      model = UnigramModel(m_step(e.counts));
      local.em_steps.push_back(
          {round, it, model.size(), e.log_marginal, model.probability_mass()});
    }
    if (model.size() <= vocab_size) break;
    model = prune(model, units, vocab_size, config.shrink_factor);
    local.sizes_after_prune.push_back(model.size());
    local.mass_after_prune.push_back(model.probability_mass());
  }
  if (trace != nullptr) *trace = std::move(local);
  return model;
}

UnigramModel train_unigram(std::span<const std::string> sentences, std::size_t vocab_size,
                           const UnigramTrainConfig& config, UnigramTrainTrace* trace) {
  return train_unigram_units(unigram_training_units(sentences), vocab_size, config, trace);
}

std::vector<std::string> encode_unigram(const UnigramModel& model, std::string_view sentence) {
  if (sentence.find(kWordBoundary) != std::string_view::npos) {
    throw InputError("reserved boundary marker in input");
  }
  std::vector<std::string> out;
  std::string unit;
  for (auto word : split_whitespace(sentence)) {
    unit.assign(kWordBoundary);
    unit.append(word);
    auto pieces = viterbi_segment(model, unit);
    out.insert(out.end(), std::make_move_iterator(pieces.begin()),
               std::make_move_iterator(pieces.end()));
  }
  return out;
}

std::string decode_unigram(std::span<const std::string> pieces) {
  std::string joined;
  for (const auto& p : pieces) joined += p;
  std::string out;
  std::size_t pos = 0;
  while (pos < joined.size()) {
    const auto hit = joined.find(kWordBoundary, pos);
    if (hit == std::string::npos) {
      out.append(joined, pos);
      break;
    }
    out.append(joined, pos, hit - pos);
    if (!out.empty()) out.push_back(' ');
    pos = hit + kWordBoundary.size();
  }
  return out;
}

}  // namespace subtok
