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

#include "subtok/bpe.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "subtok/error.h"
#include "subtok/utf8.h"

namespace subtok {
namespace {

constexpr std::string_view kMergesHeader = "#bpe v1 eow=";

void append_pair_key(std::string& key, std::string_view left, std::string_view right) {
  key.clear();
  key.append(left);
  key.push_back('\0');
  key.append(right);
}

void check_word(std::string_view word, std::string_view eow) {
  if (word.find(eow) != std::string_view::npos) {
    throw InputError("reserved marker in input: " + std::string(word));
  }
}

}  // namespace

PairCounts pair_counts(const WordReps& words) {
  PairCounts counts;
  for (const auto& [word, rep] : words) {
    const auto& [symbols, freq] = rep;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      counts[{symbols[i], symbols[i + 1]}] += freq;
    }
  }
  return counts;
}

BpeModel::BpeModel(std::vector<std::string> initial_symbols, std::vector<MergeRule> merges,
                   std::string eow)
    : initial_(std::move(initial_symbols)), merges_(std::move(merges)), eow_(std::move(eow)) {
  if (eow_.empty()) throw InputError("end-of-word marker must be non-empty");
  std::sort(initial_.begin(), initial_.end());
  initial_.erase(std::unique(initial_.begin(), initial_.end()), initial_.end());
  if (!std::binary_search(initial_.begin(), initial_.end(), eow_)) {
    initial_.insert(std::upper_bound(initial_.begin(), initial_.end(), eow_), eow_);
  }

  StringSet known(initial_.begin(), initial_.end());
  std::string key;
  for (std::size_t r = 0; r < merges_.size(); ++r) {
    auto& rule = merges_[r];
    if (rule.rank != static_cast<int>(r)) {
      throw InputError("merge ranks must be contiguous from 0");
    }
    if (!known.contains(rule.left) || !known.contains(rule.right)) {
      throw InputError("merge " + std::to_string(r) + " uses an underivable symbol");
    }
    if (!known.insert(rule.left + rule.right).second) {
      throw InputError("merge " + std::to_string(r) + " produces an existing symbol");
    }
    append_pair_key(key, rule.left, rule.right);
    ranks_.emplace(key, rule.rank);
  }
}

std::vector<std::string> BpeModel::vocabulary() const {
  std::vector<std::string> vocab = initial_;
  vocab.reserve(vocab_size());
  for (const auto& rule : merges_) vocab.push_back(rule.left + rule.right);
  return vocab;
}

std::vector<std::string> BpeModel::encode(std::string_view word, std::size_t max_merges) const {
  if (word.empty()) throw InputError("cannot encode an empty word");
  check_word(word, eow_);

  std::vector<std::string> symbols;
  for (auto c : utf8::split_chars(word)) symbols.emplace_back(c);
  symbols.push_back(eow_);

  // Merged symbols are always new strings, so repeatedly taking the
  // lowest-ranked adjacent pair is the same as applying rules in rank order.
  const int limit = static_cast<int>(std::min(max_merges, merges_.size()));
  std::string key;
  while (symbols.size() > 1) {
    int best = limit;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      append_pair_key(key, symbols[i], symbols[i + 1]);
      auto it = ranks_.find(key);
      if (it != ranks_.end() && it->second < best) best = it->second;
    }
    if (best == limit) break;

    const MergeRule& rule = merges_[best];
    std::vector<std::string> merged;
    merged.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == rule.left && symbols[i + 1] == rule.right) {
        merged.push_back(rule.left + rule.right);
        i += 2;
      } else {
        merged.push_back(std::move(symbols[i]));
        ++i;
      }
    }
    symbols = std::move(merged);
  }
  return symbols;
}

void BpeModel::save_merges(std::ostream& out) const {
  out << kMergesHeader << eow_ << '\n';
  for (const auto& rule : merges_) out << rule.left << '\t' << rule.right << '\n';
}

void BpeModel::save_vocab(std::ostream& out) const {
  const auto vocab = vocabulary();
  for (std::size_t i = 0; i < vocab.size(); ++i) out << vocab[i] << '\t' << i << '\n';
}

BpeModel BpeModel::load(std::istream& merges_in, std::istream* vocab_in) {
  std::string line;
  if (!std::getline(merges_in, line) || !line.starts_with(kMergesHeader)) {
    throw InputError("not a BPE merges file (missing '#bpe v1' header)");
  }
  std::string eow = line.substr(kMergesHeader.size());

  std::vector<MergeRule> merges;
  std::size_t line_no = 1;
  while (std::getline(merges_in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InputError("malformed merge on line " + std::to_string(line_no));
    }
    merges.push_back({line.substr(0, tab), line.substr(tab + 1), static_cast<int>(merges.size())});
  }

  std::vector<std::string> initial;
  if (vocab_in != nullptr) {
    std::vector<std::string> vocab;
    while (std::getline(*vocab_in, line)) {
      if (line.empty()) continue;
      vocab.push_back(line.substr(0, line.rfind('\t')));
    }
    if (vocab.size() < merges.size()) throw InputError("vocabulary shorter than merge list");
    initial.assign(vocab.begin(), vocab.end() - static_cast<std::ptrdiff_t>(merges.size()));
  } else {
    StringSet chars;
    for (const auto& rule : merges) {
      for (const auto* side : {&rule.left, &rule.right}) {
        std::string_view s = *side;
        if (s.ends_with(eow)) s.remove_suffix(eow.size());
        for (auto c : utf8::split_chars(s)) chars.emplace(c);
      }
    }
    initial.assign(chars.begin(), chars.end());
  }
  return BpeModel(std::move(initial), std::move(merges), std::move(eow));
}

BpeModel BpeModel::load(const std::filesystem::path& merges_path) {
  std::ifstream merges(merges_path, std::ios::binary);
  if (!merges) throw InputError("cannot open BPE model: " + merges_path.string());
  auto vocab_path = merges_path;
  vocab_path += ".vocab";
  std::ifstream vocab(vocab_path, std::ios::binary);
  return load(merges, vocab ? &vocab : nullptr);
}

namespace {

// Incremental trainer: keeps global pair counts plus an index from each
// pair to the words containing it, and only rescans affected words.
class BpeTrainer {
 public:
  BpeTrainer(const TokenFrequencyTable& freqs, const BpeTrainOptions& options)
      : options_(options), queue_(QueueOrder{&symbols_}) {
    StringSet chars;
    for (const auto& [word, freq] : freqs.sorted()) {
      check_word(word, options_.eow);
      Word w;
      w.freq = freq;
      for (auto c : utf8::split_chars(word)) {
        chars.emplace(c);
        w.symbols.push_back(intern(c));
      }
      w.symbols.push_back(intern(options_.eow));
      words_.push_back(std::move(w));
    }
    initial_.assign(chars.begin(), chars.end());
    initial_.push_back(options_.eow);

    for (std::size_t w = 0; w < words_.size(); ++w) {
      const auto& syms = words_[w].symbols;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        const auto key = pair_key(syms[i], syms[i + 1]);
        counts_[key] += static_cast<std::int64_t>(words_[w].freq);
        where_[key].push_back(static_cast<std::uint32_t>(w));
      }
    }
    for (const auto& [key, count] : counts_) queue_.insert({count, key});
  }

  BpeModel run(std::size_t num_merges, BpeTrainLog* log) {
    std::vector<MergeRule> merges;
    BpeTrainLog local;
    local.merges_requested = num_merges;
    std::vector<std::uint32_t> stamp(words_.size(), 0);
    std::uint32_t epoch = 0;

    while (merges.size() < num_merges) {
      if (queue_.empty()) {
        local.stopped_early = true;
        local.stop_reason = "no symbol pairs left";
        break;
      }
      const auto [count, key] = *queue_.begin();
      if (count < static_cast<std::int64_t>(options_.min_pair_count)) {
        local.stopped_early = true;
        local.stop_reason = "most frequent pair occurs " + std::to_string(count) +
                            " time(s), below " + std::to_string(options_.min_pair_count);
        break;
      }
      const std::uint32_t left = key >> 32;
      const std::uint32_t right = key & 0xFFFFFFFFu;
      std::string merged = symbols_[left] + symbols_[right];
      if (ids_.contains(merged)) {
        queue_.erase(queue_.begin());
        banned_.insert(key);
        ++local.skipped_duplicate_pairs;
        continue;
      }
      const std::uint32_t new_id = intern(merged);
      merges.push_back({symbols_[left], symbols_[right], static_cast<int>(merges.size())});

      ++epoch;
      std::vector<std::uint32_t> affected = std::move(where_[key]);
      where_.erase(key);
      for (std::uint32_t w : affected) {
        if (stamp[w] == epoch) continue;
        stamp[w] = epoch;
        apply_merge(w, left, right, new_id);
      }
      flush_deltas();
    }
    local.merges_performed = merges.size();
    if (log != nullptr) *log = local;
    return BpeModel(initial_, std::move(merges), options_.eow);
  }

 private:
  struct Word {
    std::vector<std::uint32_t> symbols;
    std::uint64_t freq = 0;
  };
  using Entry = std::pair<std::int64_t, std::uint64_t>;  // (count, pair key)

  // Highest count first, then (left, right) ascending by string.
  struct QueueOrder {
    const std::vector<std::string>* symbols;
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.first != b.first) return a.first > b.first;
      const auto& s = *symbols;
      const auto& al = s[a.second >> 32];
      const auto& bl = s[b.second >> 32];
      if (al != bl) return al < bl;
      return s[a.second & 0xFFFFFFFFu] < s[b.second & 0xFFFFFFFFu];
    }
  };

  static std::uint64_t pair_key(std::uint32_t l, std::uint32_t r) {
    return (static_cast<std::uint64_t>(l) << 32) | r;
  }

  std::uint32_t intern(std::string_view s) {
    auto it = ids_.find(s);
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(symbols_.size());
    symbols_.emplace_back(s);
    ids_.emplace(std::string(s), id);
    return id;
  }

  void apply_merge(std::uint32_t w, std::uint32_t left, std::uint32_t right, std::uint32_t new_id) {
    auto& word = words_[w];
    const auto freq = static_cast<std::int64_t>(word.freq);
    auto& syms = word.symbols;
    bool found = false;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      if (syms[i] == left && syms[i + 1] == right) found = true;
    }
    if (!found) return;  // stale index entry

    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      deltas_[pair_key(syms[i], syms[i + 1])] -= freq;
    }
    std::vector<std::uint32_t> merged;
    merged.reserve(syms.size());
    for (std::size_t i = 0; i < syms.size();) {
      if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
        merged.push_back(new_id);
        i += 2;
      } else {
        merged.push_back(syms[i]);
        ++i;
      }
    }
    syms = std::move(merged);
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      const auto key = pair_key(syms[i], syms[i + 1]);
      deltas_[key] += freq;
      if (syms[i] == new_id || syms[i + 1] == new_id) where_[key].push_back(w);
    }
  }

  void flush_deltas() {
    for (const auto& [key, delta] : deltas_) {
      if (delta == 0) continue;
      auto it = counts_.find(key);
      const std::int64_t old = it == counts_.end() ? 0 : it->second;
      const std::int64_t now = old + delta;
      const bool banned = banned_.contains(key);
      if (old > 0 && !banned) queue_.erase({old, key});
      if (now > 0) {
        counts_[key] = now;
        if (!banned) queue_.insert({now, key});
      } else if (it != counts_.end()) {
        counts_.erase(it);
      }
    }
    deltas_.clear();
  }

  BpeTrainOptions options_;
  std::vector<std::string> symbols_;
  StringMap<std::uint32_t> ids_;
  std::vector<std::string> initial_;
  std::vector<Word> words_;
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where_;
  std::unordered_map<std::uint64_t, std::int64_t> deltas_;
  std::unordered_set<std::uint64_t> banned_;
  std::set<Entry, QueueOrder> queue_;
};

}  // namespace

BpeModel train_bpe(const TokenFrequencyTable& freqs, std::size_t num_merges,
                   const BpeTrainOptions& options, BpeTrainLog* log) {
  if (freqs.empty()) throw InputError("empty corpus");
  BpeTrainer trainer(freqs, options);
  return trainer.run(num_merges, log);
}

TokenFrequencyTable bpe_training_words(std::span<const std::string> sentences,
                                       bool sentence_as_word) {
  if (!sentence_as_word) return count_words(sentences);
  TokenFrequencyTable table;
  for (const auto& s : sentences) table.add(s);
  return table;
}

std::vector<std::string> encode_bpe(const BpeModel& model, std::string_view word) {
  return model.encode(word);
}

std::vector<std::string> tokenize_sentence_bpe(const BpeModel& model,
                                                std::span<const std::string_view> words) {
  std::vector<std::string> out;
  for (auto word : words) {
    auto pieces = model.encode(word);
    out.insert(out.end(), std::make_move_iterator(pieces.begin()),
               std::make_move_iterator(pieces.end()));
  }
  return out;
}

std::string decode_bpe(const BpeModel& model, std::span<const std::string> pieces) {
  std::string joined;
  for (const auto& p : pieces) joined += p;
  std::string out;
  const auto& eow = model.eow();
  std::size_t pos = 0;
  while (pos < joined.size()) {
    const auto hit = joined.find(eow, pos);
    if (hit == std::string::npos) {
      out.append(joined, pos);
      break;
    }
    out.append(joined, pos, hit - pos);
    out.push_back(' ');
    pos = hit + eow.size();
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace subtok
