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

#include "subtok/cli.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <variant>

#include "CLI11.hpp"
#include "subtok/bpe.h"
#include "subtok/compose.h"
#include "subtok/corpus.h"
#include "subtok/error.h"
#include "subtok/eval.h"
#include "subtok/glove.h"
#include "subtok/unigram.h"
#include "subtok/utf8.h"
#include "subtok/vectors.h"

namespace subtok::cli {
namespace {

namespace fs = std::filesystem;
using Tokenizer = std::variant<BpeModel, UnigramModel>;

void require_file(const std::string& path, std::string_view what) {
  if (!fs::is_regular_file(path)) {
    throw InputError("missing " + std::string(what) + ": " + path);
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

Tokenizer load_tokenizer(const std::string& path) {
  require_file(path, "tokenizer model");
  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  if (header.starts_with("#bpe")) return BpeModel::load(fs::path(path));
  if (header.starts_with("#unigram")) return UnigramModel::load(fs::path(path));
  throw InputError("unrecognised tokenizer model: " + path);
}

std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Inserts "--key=value" pairs from a --config file right after the
// subcommand so later command-line flags override them.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw InputError("cannot open config file: " + config_path);
  std::vector<std::string> injected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = normalize(line);
    if (trimmed.empty() || trimmed.starts_with('#')) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) + " is not key=value");
    }
    std::string key = normalize(trimmed.substr(0, eq));
    std::string value = normalize(trimmed.substr(eq + 1));
    while (key.starts_with('-')) key.erase(0, 1);
    std::replace(key.begin(), key.end(), '_', '-');
    injected.push_back("--" + key + "=" + value);
  }
  auto sub = std::find_if(args.begin() + 1, args.end(),
                          [](const std::string& a) { return !a.starts_with('-'); });
  if (sub == args.end()) throw InputError("--config needs a subcommand");
  args.insert(sub + 1, injected.begin(), injected.end());
  return args;
}

struct CorpusOptions {
  std::size_t max_sentence_length = 16384;
  bool lowercase = false;
  bool nfkc = false;

  NormalizationConfig normalization() const {
    NormalizationConfig c;
    c.max_sentence_length = max_sentence_length;
    c.lowercase = lowercase;
    c.nfkc = nfkc;
    return c;
  }
};

void add_corpus_options(CLI::App* cmd, CorpusOptions& o) {
  cmd->add_option("--max-sentence-length", o.max_sentence_length,
                  "Truncate sentences to this many characters")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--lowercase", o.lowercase, "Lowercase the corpus");
  cmd->add_flag("--nfkc", o.nfkc, "Apply Unicode NFKC");
}

std::vector<std::string> read_corpus(const std::string& path, const CorpusOptions& o,
                                     InputMode mode = InputMode::kRaw) {
  require_file(path, "corpus");
  auto stream = SentenceStream::open(path, o.normalization(), mode);
  return stream.read_all();
}

// ---------------------------------------------------------------- train-tokenizer

struct TrainTokenizerArgs {
  std::string method;
  std::string corpus;
  std::string output;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 1;
  std::size_t max_sentences = 0;
  bool sentence_as_word = false;
  std::size_t seed_size = 0;
  std::size_t max_piece_len = 16;
  double shrink = 0.75;
  int threads = 1;
  CorpusOptions corpus_options;
};

std::size_t distinct_chars(const TokenFrequencyTable& words) {
  StringSet chars;
  for (const auto& [word, count] : words.entries()) {
    for (auto c : utf8::split_chars(word)) chars.emplace(c);
  }
  return chars.size();
}

void train_tokenizer(const TrainTokenizerArgs& a, std::ostream& out) {
  std::vector<std::string> sentences = read_corpus(a.corpus, a.corpus_options);
  std::mt19937_64 rng(a.seed);
  std::shuffle(sentences.begin(), sentences.end(), rng);
  if (a.max_sentences > 0 && sentences.size() > a.max_sentences) sentences.resize(a.max_sentences);
  if (sentences.empty()) throw InputError("empty corpus: " + a.corpus);

  if (a.method == "bpe") {
    const auto words = bpe_training_words(sentences, a.sentence_as_word);
    const std::size_t initial = distinct_chars(words) + 1;
    const std::size_t merges = a.vocab_size > initial ? a.vocab_size - initial : 0;
    BpeTrainLog log;
    const BpeModel model = train_bpe(words, merges, {}, &log);
    {
      auto f = open_output(a.output);
      model.save_merges(f);
      auto v = open_output(a.output + ".vocab");
      model.save_vocab(v);
    }
    out << "method: bpe\n";
    out << "sentences: " << sentences.size() << '\n';
    out << "initial_symbols: " << model.initial_symbols().size() << '\n';
    out << "merges_requested: " << log.merges_requested << '\n';
    out << "merges_performed: " << log.merges_performed << '\n';
    if (log.stopped_early) out << "stopped_early: " << log.stop_reason << '\n';
    out << "vocab_size: " << model.vocab_size() << '\n';
  } else {
    UnigramTrainConfig config;
    config.seed_size = a.seed_size;
    config.max_piece_len = a.max_piece_len;
    config.shrink_factor = a.shrink;
    config.threads = a.threads;
    UnigramTrainTrace trace;
    const UnigramModel model = train_unigram(sentences, a.vocab_size, config, &trace);
    {
      auto f = open_output(a.output);
      model.save(f);
    }
    out << "method: unigram\n";
    out << "sentences: " << sentences.size() << '\n';
    out << "seed_pieces: " << trace.seed_size << '\n';
    out << "prune_rounds: " << trace.sizes_after_prune.size() << '\n';
    if (!trace.em_steps.empty()) {
      out << "final_log_likelihood: " << fixed6(trace.em_steps.back().log_marginal) << '\n';
    }
    out << "vocab_size: " << model.size() << '\n';
  }
}

// ---------------------------------------------------------------- encode

struct EncodeArgs {
  std::string model;
  std::string corpus;
  std::string output;
  CorpusOptions corpus_options;
};

void encode(const EncodeArgs& a, std::ostream& out, std::ostream& err) {
  const Tokenizer tok = load_tokenizer(a.model);
  require_file(a.corpus, "corpus");
  auto stream = SentenceStream::open(a.corpus, a.corpus_options.normalization(), InputMode::kRaw);
  auto f = open_output(a.output);

  StringMap<std::vector<std::string>> cache;
  std::size_t lines = 0;
  std::size_t skipped = 0;
  std::string line;
  while (auto sentence = stream.next()) {
    std::vector<std::string> pieces;
    if (const auto* bpe = std::get_if<BpeModel>(&tok)) {
      for (auto word : split_whitespace(*sentence)) {
        auto it = cache.find(word);
        if (it == cache.end()) it = cache.emplace(std::string(word), bpe->encode(word)).first;
        pieces.insert(pieces.end(), it->second.begin(), it->second.end());
      }
    } else {
      try {
        pieces = encode_unigram(std::get<UnigramModel>(tok), *sentence);
      } catch (const UncoveredCharacterError&) {
        ++skipped;
        continue;
      }
    }
    line.clear();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (i) line.push_back(' ');
      line += pieces[i];
    }
    line.push_back('\n');
    f << line;
    ++lines;
  }
  if (!f) throw Error("write failed: " + a.output);
  out << "encoded_lines: " << lines << '\n';
  out << "skipped_lines: " << skipped << '\n';
  if (skipped > 0) {
    err << "warning: skipped " << skipped << " line(s) with uncovered characters\n";
  }
}

// ---------------------------------------------------------------- cooccur / train-embeddings

struct CooccurArgs {
  std::string corpus;
  std::string output;
  std::string vocab_output;
  std::string counts_output;
  std::size_t window = 15;
  std::uint64_t min_count = 1;
};

std::vector<std::string> read_vocab(const std::string& path) {
  require_file(path, "vocabulary");
  std::ifstream in(path, std::ios::binary);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    tokens.push_back(line.substr(0, line.rfind('\t')));
  }
  return tokens;
}

struct CooccurResult {
  TokenFrequencyTable counts;
  TokenVocabulary vocab;
  CooccurrenceTable table;
};

CooccurResult build_from_corpus(const std::string& corpus, std::size_t window,
                                std::uint64_t min_count) {
  CorpusOptions plain;
  const auto sentences = read_corpus(corpus, plain, InputMode::kPretokenised);
  CooccurResult r;
  r.counts = count_words(sentences);
  if (r.counts.empty()) throw InputError("empty corpus: " + corpus);
  r.vocab = TokenVocabulary::from_counts(r.counts, min_count);
  r.table = build_cooccurrence(sentences, r.vocab, window);
  return r;
}

void write_vocab(const std::string& path, const TokenVocabulary& vocab,
                 const TokenFrequencyTable& counts) {
  auto f = open_output(path);
  for (const auto& token : vocab.tokens()) f << token << '\t' << counts.count(token) << '\n';
}

void cooccur(const CooccurArgs& a, std::ostream& out) {
  const auto r = build_from_corpus(a.corpus, a.window, a.min_count);
  r.table.save(fs::path(a.output));
  write_vocab(a.vocab_output, r.vocab, r.counts);
  if (!a.counts_output.empty()) {
    auto f = open_output(a.counts_output);
    r.counts.save(f);
  }
  out << "tokens: " << r.counts.total_count() << '\n';
  out << "vocab_size: " << r.vocab.size() << '\n';
  out << "entries: " << r.table.size() << '\n';
}

struct TrainEmbeddingsArgs {
  std::string corpus;
  std::string cooccur;
  std::string vocab;
  std::string output;
  std::string cooccur_output;
  std::string vocab_output;
  std::string counts_output;
  std::uint64_t min_count = 1;
  TrainConfig config;
};

void train_embeddings(const TrainEmbeddingsArgs& a, std::ostream& out) {
  CooccurrenceTable table;
  std::vector<std::string> tokens;
  if (!a.corpus.empty()) {
    auto r = build_from_corpus(a.corpus, a.config.window, a.min_count);
    if (!a.cooccur_output.empty()) r.table.save(fs::path(a.cooccur_output));
    if (!a.vocab_output.empty()) write_vocab(a.vocab_output, r.vocab, r.counts);
    if (!a.counts_output.empty()) {
      auto f = open_output(a.counts_output);
      r.counts.save(f);
    }
    table = std::move(r.table);
    tokens = r.vocab.tokens();
  } else {
    if (a.cooccur.empty() || a.vocab.empty()) {
      throw InputError("train-embeddings needs --corpus or both --cooccur and --vocab");
    }
    require_file(a.cooccur, "co-occurrence file");
    table = CooccurrenceTable::load(fs::path(a.cooccur));
    tokens = read_vocab(a.vocab);
  }

  std::vector<double> losses;
  const EmbeddingSet emb = train_glove(table, tokens, a.config, &losses);
  for (std::size_t e = 0; e < losses.size(); ++e) {
    out << "epoch " << e + 1 << " loss " << fixed6(losses[e]) << '\n';
  }
  if (!losses.empty()) out << "final_loss: " << fixed6(losses.back()) << '\n';
  const std::vector<std::string> comments = {
      "glove dim=" + std::to_string(a.config.dim) + " vocab=" + std::to_string(emb.size()) +
      " window=" + std::to_string(a.config.window) + " x_max=" + fixed6(a.config.x_max) +
      " epochs=" + std::to_string(a.config.epochs)};
  write_vectors(fs::path(a.output), emb.exported(), comments);
  out << "vocab_size: " << emb.size() << '\n';
  out << "dim: " << emb.dim() << '\n';
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string embeddings;
  std::string dataset;
  std::string model;
  std::string counts;
  std::string method = "unweighted";
  double a = 0.001;
  bool by_pos = false;
  std::string csv;
  std::string composed_output;
};

void eval(const EvalArgs& a, std::ostream& out) {
  require_file(a.embeddings, "embeddings");
  require_file(a.dataset, "dataset");
  const VectorTable embeddings = read_vectors(fs::path(a.embeddings));
  const SimilarityDataset dataset = SimilarityDataset::load(fs::path(a.dataset));

  std::string tokenizer_name = "pretokenised";
  WordTokenizer tokenizer = WordTokenizer::pretokenised();
  if (!a.model.empty()) {
    Tokenizer tok = load_tokenizer(a.model);
    if (auto* bpe = std::get_if<BpeModel>(&tok)) {
      tokenizer_name = "bpe";
      tokenizer = WordTokenizer::bpe(std::move(*bpe));
    } else {
      tokenizer_name = "unigram";
      tokenizer = WordTokenizer::unigram(std::move(std::get<UnigramModel>(tok)));
    }
  }

  std::vector<CompositionMethod> methods;
  if (a.method == "all") {
    methods = {CompositionMethod::kUnweighted, CompositionMethod::kWeighted,
               CompositionMethod::kWeightedPcRemoved};
  } else {
    methods = {parse_method(a.method)};
  }
  const bool needs_probs = std::any_of(methods.begin(), methods.end(), [](auto m) {
    return m != CompositionMethod::kUnweighted;
  });
  SubwordProbabilityTable probs;
  if (needs_probs) {
    if (a.counts.empty()) throw InputError("weighted composition needs --counts");
    require_file(a.counts, "piece counts");
    std::ifstream in(a.counts, std::ios::binary);
    probs = SubwordProbabilityTable::from_counts(TokenFrequencyTable::load(in));
  }

  const auto words = dataset.words();
  std::vector<std::string> csv_rows;
  for (const auto method : methods) {
    const WordEmbeddingMatrix composed =
        compose_words(words, tokenizer, embeddings, probs, {method, a.a});
    const EvalReport report = a.by_pos ? evaluate_by_pos(dataset, composed)
                                       : evaluate_similarity(dataset, composed);
    std::map<std::string, std::string> labels = {{"dataset", dataset.name},
                                                 {"tokenizer", tokenizer_name},
                                                 {"method", std::string(method_name(method))}};
    if (method != CompositionMethod::kUnweighted) labels["a"] = fixed6(a.a);
    write_report(out, report, labels);
    out << '\n';
    csv_rows.push_back(report_csv_row(report, dataset.name, tokenizer_name, method_name(method)));

    if (!a.composed_output.empty()) {
      std::string path = a.composed_output;
      if (methods.size() > 1) path += "." + std::string(method_name(method));
      std::vector<std::string> comments = {"composed method=" + std::string(method_name(method)) +
                                           " a=" + fixed6(a.a)};
      for (std::size_t i = 0; i < composed.words.size(); ++i) {
        if (composed.oov[i]) comments.push_back("oov " + composed.words[i]);
      }
      write_vectors(fs::path(path), composed.table(), comments);
    }
  }

  if (!a.csv.empty()) {
    const bool fresh = !fs::exists(a.csv) || fs::file_size(a.csv) == 0;
    std::ofstream f(a.csv, std::ios::app);
    if (!f) throw InputError("cannot write " + a.csv);
    if (fresh) f << report_csv_header() << '\n';
    for (const auto& row : csv_rows) f << row << '\n';
  }
}

// ---------------------------------------------------------------- neighbors / analogy

void print_neighbors(std::ostream& out, const std::vector<Neighbor>& list) {
  for (const auto& n : list) out << n.token << " (" << fixed6(n.cosine) << ")\n";
}

struct NeighborsArgs {
  std::string embeddings;
  std::vector<std::string> queries;
  std::size_t k = 10;
};

void neighbors(const NeighborsArgs& a, std::ostream& out) {
  require_file(a.embeddings, "embeddings");
  const VectorTable table = read_vectors(fs::path(a.embeddings));
  for (const auto& q : a.queries) {
    const auto list = nearest_neighbors(table, q, a.k);
    out << "query: " << q << '\n';
    print_neighbors(out, list);
  }
}

struct AnalogyArgs {
  std::string embeddings;
  std::string a;
  std::string b;
  std::string c;
  std::size_t k = 4;
  bool exclude_queries = false;
};

void analogy(const AnalogyArgs& a, std::ostream& out) {
  require_file(a.embeddings, "embeddings");
  const VectorTable table = read_vectors(fs::path(a.embeddings));
  const auto list = solve_analogy(table, a.a, a.b, a.c, a.k, a.exclude_queries);
  out << "analogy: " << a.b << " - " << a.a << " + " << a.c << '\n';
  print_neighbors(out, list);
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string corpus;
  std::vector<std::size_t> sentence_counts = {0};
  std::vector<std::size_t> vocab_sizes = {500, 1000, 2000};
  std::vector<std::string> methods = {"bpe", "unigram"};
  int repeats = 1;
  std::string output;
  CorpusOptions corpus_options;
};

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.starts_with("model name")) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return normalize(line.substr(colon + 1));
    }
  }
  return "unknown";
}

void bench(const BenchArgs& a, std::ostream& out) {
  const std::vector<std::string> all = read_corpus(a.corpus, a.corpus_options);
  for (const auto& m : a.methods) {
    if (m != "bpe" && m != "unigram") throw InputError("unknown bench method: " + m);
  }
  std::ostringstream csv;
  csv << "# hardware: " << cpu_model() << "; hardware_threads="
      << std::thread::hardware_concurrency() << "; threads=1\n";
  csv << "method,vocab_size,sentence_count,wall_time_seconds,peak_pieces,repeat\n";

  for (std::size_t requested : a.sentence_counts) {
    const std::size_t n = requested == 0 ? all.size() : requested;
    if (n > all.size()) {
      throw InputError("corpus has " + std::to_string(all.size()) + " sentences, " +
                       std::to_string(n) + " requested");
    }
    const std::span<const std::string> prefix(all.data(), n);
    for (const auto& method : a.methods) {
      for (std::size_t vocab : a.vocab_sizes) {
        for (int rep = 0; rep < a.repeats; ++rep) {
          const auto start = std::chrono::steady_clock::now();
          std::size_t peak = 0;
          if (method == "bpe") {
            const auto words = bpe_training_words(prefix, false);
            const std::size_t initial = distinct_chars(words) + 1;
            const BpeModel model =
                train_bpe(words, vocab > initial ? vocab - initial : 0);
            peak = model.vocab_size();
          } else {
            UnigramTrainTrace trace;
            UnigramTrainConfig config;
            config.threads = 1;
            train_unigram(prefix, vocab, config, &trace);
            peak = trace.seed_size;
          }
          const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
          const double seconds = std::max(elapsed.count(), 1e-9);
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.6f", seconds);
          csv << method << ',' << vocab << ',' << n << ',' << buf << ',' << peak << ','
              << rep + 1 << '\n';
        }
      }
    }
  }
  if (a.output.empty() || a.output == "-") {
    out << csv.str();
  } else {
    auto f = open_output(a.output);
    f << csv.str();
    out << "wrote " << a.output << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subword tokenisers, subword embeddings and word-similarity evaluation",
               "subtok"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", "subtok 0.1.0");
  app.add_option("--config", "Flat key=value file of defaults for the subcommand");

  std::function<void()> action;

  TrainTokenizerArgs tt;
  auto* cmd = app.add_subcommand("train-tokenizer", "Train a BPE or unigram tokenizer");
  cmd->add_option("--method", tt.method, "bpe or unigram")
      ->required()
      ->check(CLI::IsMember({"bpe", "unigram"}));
  cmd->add_option("--corpus", tt.corpus, "One sentence per line")->required();
  cmd->add_option("--output", tt.output, "Model file")->required();
  cmd->add_option("--vocab-size", tt.vocab_size, "Target vocabulary size")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", tt.seed, "Sentence shuffling seed")->capture_default_str();
  cmd->add_option("--max-sentences", tt.max_sentences, "Train on this many shuffled sentences (0 = all)");
  cmd->add_flag("--sentence-as-word", tt.sentence_as_word,
                "BPE: treat each sentence as one word (no-space scripts)");
  cmd->add_option("--seed-size", tt.seed_size, "Unigram seed pieces (0 = 8 x vocab)");
  cmd->add_option("--max-piece-len", tt.max_piece_len, "Unigram: longest piece in characters")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--shrink", tt.shrink, "Unigram: fraction kept per pruning round")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--threads", tt.threads, "Unigram E-step threads")->check(CLI::PositiveNumber);
  add_corpus_options(cmd, tt.corpus_options);
  cmd->callback([&] { action = [&] { train_tokenizer(tt, out); }; });

  EncodeArgs en;
  cmd = app.add_subcommand("encode", "Tokenise a corpus with a trained model");
  cmd->add_option("--model", en.model)->required();
  cmd->add_option("--corpus", en.corpus)->required();
  cmd->add_option("--output", en.output)->required();
  add_corpus_options(cmd, en.corpus_options);
  cmd->callback([&] { action = [&] { encode(en, out, err); }; });

  CooccurArgs co;
  cmd = app.add_subcommand("cooccur", "Build distance-weighted co-occurrence counts");
  cmd->add_option("--corpus", co.corpus, "Tokenised corpus (space-separated pieces)")->required();
  cmd->add_option("--output", co.output, "Binary (u32, u32, f64) records")->required();
  cmd->add_option("--vocab-output", co.vocab_output, "TOKEN<TAB>COUNT in id order")->required();
  cmd->add_option("--counts-output", co.counts_output, "Counts of every token");
  cmd->add_option("--window", co.window)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--min-count", co.min_count)->capture_default_str();
  cmd->callback([&] { action = [&] { cooccur(co, out); }; });

  TrainEmbeddingsArgs te;
  cmd = app.add_subcommand("train-embeddings", "Train GloVe token embeddings");
  cmd->add_option("--corpus", te.corpus, "Tokenised corpus (builds co-occurrences)");
  cmd->add_option("--cooccur", te.cooccur, "Binary co-occurrence file");
  cmd->add_option("--vocab", te.vocab, "Vocabulary written by cooccur");
  cmd->add_option("--output", te.output, "Embedding text file")->required();
  cmd->add_option("--cooccur-output", te.cooccur_output);
  cmd->add_option("--vocab-output", te.vocab_output);
  cmd->add_option("--counts-output", te.counts_output);
  cmd->add_option("--min-count", te.min_count)->capture_default_str();
  cmd->add_option("--dim", te.config.dim)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--window", te.config.window)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--x-max", te.config.x_max)->capture_default_str();
  cmd->add_option("--alpha", te.config.alpha)->capture_default_str();
  cmd->add_option("--lr", te.config.learning_rate)->capture_default_str();
  cmd->add_option("--epochs", te.config.epochs)->capture_default_str();
  cmd->add_option("--seed", te.config.seed)->capture_default_str();
  cmd->add_option("--threads", te.config.threads)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->callback([&] { action = [&] { train_embeddings(te, out); }; });

  EvalArgs ev;
  cmd = app.add_subcommand("eval", "Compose word vectors and score a similarity dataset");
  cmd->add_option("--embeddings", ev.embeddings)->required();
  cmd->add_option("--dataset", ev.dataset, "WORD1<TAB>WORD2<TAB>RATING[<TAB>POS]")->required();
  cmd->add_option("--model", ev.model, "Tokenizer model (omit for pre-tokenised embeddings)");
  cmd->add_option("--counts", ev.counts, "TOKEN<TAB>COUNT piece counts for SIF weights");
  cmd->add_option("--method", ev.method)
      ->check(CLI::IsMember({"unweighted", "weighted", "weighted_pc_removed", "all"}))
      ->capture_default_str();
  cmd->add_option("--a", ev.a, "SIF smoothing")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--by-pos", ev.by_pos, "Per-category scores");
  cmd->add_option("--csv", ev.csv, "Append a CSV row per method");
  cmd->add_option("--composed-output", ev.composed_output, "Write the composed word vectors");
  cmd->callback([&] { action = [&] { eval(ev, out); }; });

  NeighborsArgs nb;
  cmd = app.add_subcommand("neighbors", "Nearest neighbours by cosine");
  cmd->add_option("--embeddings", nb.embeddings)->required();
  cmd->add_option("--query", nb.queries)
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->delimiter(',');
  cmd->add_option("--k", nb.k)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->callback([&] { action = [&] { neighbors(nb, out); }; });

  AnalogyArgs an;
  cmd = app.add_subcommand("analogy", "Rank candidates d for b - a + c");
  cmd->add_option("--embeddings", an.embeddings)->required();
  cmd->add_option("--a", an.a)->required();
  cmd->add_option("--b", an.b)->required();
  cmd->add_option("--c", an.c)->required();
  cmd->add_option("--k", an.k)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--exclude-queries", an.exclude_queries);
  cmd->callback([&] { action = [&] { analogy(an, out); }; });

  BenchArgs be;
  cmd = app.add_subcommand("bench", "Single-threaded tokenizer training times as CSV");
  cmd->add_option("--corpus", be.corpus)->required();
  cmd->add_option("--sentences", be.sentence_counts, "Sentence-prefix sizes (0 = whole corpus)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->delimiter(',');
  cmd->add_option("--vocab-sizes", be.vocab_sizes)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->delimiter(',');
  cmd->add_option("--methods", be.methods)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->delimiter(',');
  cmd->add_option("--repeats", be.repeats)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--output", be.output, "CSV path (default stdout)");
  add_corpus_options(cmd, be.corpus_options);
  cmd->callback([&] { action = [&] { bench(be, out); }; });

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace subtok::cli
