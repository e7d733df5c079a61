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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "subtok/bpe.h"
#include "subtok/unigram.h"
#include "subtok/utf8.h"
#include "subtok/vectors.h"
#include "test_util.h"

namespace subtok {
namespace {

using testing_util::slurp;
using testing_util::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "subtok");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Value of the first "key: value" line.
std::string field(const std::string& text, const std::string& key) {
  for (const auto& line : lines(text)) {
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  }
  return "";
}

const char* kCorpus =
    "the cat sat on the mat\n"
    "the cats sat on the mats\n"
    "a hat on a cat\n"
    "that cat has the hat\n"
    "cats and hats and mats\n";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { corpus_ = dir_.write("corpus.txt", kCorpus); }
  TempDir dir_;
  std::string corpus_;
};

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"train-tokenizer", "--help"}).code, 0);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"train-tokenizer", "--method", "bpe"}).code, 2);
  EXPECT_EQ(run({"train-tokenizer", "--method", "wordpiece", "--corpus", corpus_, "--output",
                 dir_.file("m"), "--vocab-size", "10"})
                .code,
            2);
}

TEST_F(CliTest, MissingCorpusNamesPath) {
  const auto r = run({"train-tokenizer", "--method", "bpe", "--corpus", "/no/such/corpus.txt",
                      "--output", dir_.file("m"), "--vocab-size", "10"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/no/such/corpus.txt"), std::string::npos);
}

TEST_F(CliTest, BpeMergeCountFollowsVocabIdentity) {
  // Characters: t h e c a s o n m d; plus the marker -> 11 initial symbols.
  const std::size_t initial = 1 + 10;
  const auto r = run({"train-tokenizer", "--method", "bpe", "--corpus", corpus_, "--output",
                      dir_.file("bpe.txt"), "--vocab-size", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto model = BpeModel::load(std::filesystem::path(dir_.file("bpe.txt")));
  const std::size_t merge_lines = lines(slurp(dir_.file("bpe.txt"))).size() - 1;
  EXPECT_EQ(model.initial_symbols().size(), initial);
  EXPECT_EQ(merge_lines, model.merges().size());
  if (field(r.out, "stopped_early").empty()) {
    EXPECT_EQ(merge_lines, 30 - initial);
  } else {
    EXPECT_LT(merge_lines, 30 - initial);
  }
  EXPECT_EQ(field(r.out, "vocab_size"), std::to_string(initial + merge_lines));
}

TEST_F(CliTest, UnigramAtAlphabetSizeIsCharactersOnly) {
  // 10 letters plus the boundary mark.
  const auto r = run({"train-tokenizer", "--method", "unigram", "--corpus", corpus_, "--output",
                      dir_.file("uni.txt"), "--vocab-size", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto model = UnigramModel::load(std::filesystem::path(dir_.file("uni.txt")));
  EXPECT_EQ(model.size(), 11u);
  for (const auto& [p, lp] : model.pieces()) EXPECT_TRUE(utf8::is_single_char(p)) << p;
}

TEST_F(CliTest, EncodeIsDeterministicAndReversible) {
  ASSERT_EQ(run({"train-tokenizer", "--method", "bpe", "--corpus", corpus_, "--output",
                 dir_.file("bpe.txt"), "--vocab-size", "25"})
                .code,
            0);
  ASSERT_EQ(run({"encode", "--model", dir_.file("bpe.txt"), "--corpus", corpus_, "--output",
                 dir_.file("a.enc")})
                .code,
            0);
  ASSERT_EQ(run({"encode", "--model", dir_.file("bpe.txt"), "--corpus", corpus_, "--output",
                 dir_.file("b.enc")})
                .code,
            0);
  EXPECT_EQ(slurp(dir_.file("a.enc")), slurp(dir_.file("b.enc")));
  const auto original = lines(kCorpus);
  const auto encoded = lines(slurp(dir_.file("a.enc")));
  ASSERT_EQ(encoded.size(), original.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    std::string joined;
    for (char c : encoded[i]) {
      if (c != ' ') joined.push_back(c);
    }
    std::string restored;
    for (std::size_t p = 0; p < joined.size();) {
      if (joined.compare(p, 4, "</w>") == 0) {
        restored.push_back(' ');
        p += 4;
      } else {
        restored.push_back(joined[p++]);
      }
    }
    restored.pop_back();
    EXPECT_EQ(restored, original[i]);
  }
}

TEST_F(CliTest, EncodeEmptyCorpus) {
  ASSERT_EQ(run({"train-tokenizer", "--method", "unigram", "--corpus", corpus_, "--output",
                 dir_.file("uni.txt"), "--vocab-size", "20"})
                .code,
            0);
  const auto empty = dir_.write("empty.txt", "");
  ASSERT_EQ(run({"encode", "--model", dir_.file("uni.txt"), "--corpus", empty, "--output",
                 dir_.file("out.enc")})
                .code,
            0);
  EXPECT_EQ(slurp(dir_.file("out.enc")), "");
}

TEST_F(CliTest, EncodeSkipsUncoveredUnigramLines) {
  ASSERT_EQ(run({"train-tokenizer", "--method", "unigram", "--corpus", corpus_, "--output",
                 dir_.file("uni.txt"), "--vocab-size", "20"})
                .code,
            0);
  const auto odd = dir_.write("odd.txt", "the cat\nzzz\nthe hat\n");
  const auto r = run({"encode", "--model", dir_.file("uni.txt"), "--corpus", odd, "--output",
                      dir_.file("out.enc")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(field(r.out, "skipped_lines"), "1");
  EXPECT_NE(r.err.find("skipped 1"), std::string::npos);
  EXPECT_EQ(lines(slurp(dir_.file("out.enc"))).size(), 2u);
}

TEST_F(CliTest, EmbeddingsShapeDeterminismAndLoss) {
  const auto toy = testing_util::data_path("toy_cyclic.txt");
  ASSERT_EQ(run({"cooccur", "--corpus", toy, "--output", dir_.file("x.bin"), "--vocab-output",
                 dir_.file("vocab.tsv")})
                .code,
            0);
  auto train = [&](const std::string& out, const std::string& epochs) {
    return run({"train-embeddings", "--cooccur", dir_.file("x.bin"), "--vocab",
                dir_.file("vocab.tsv"), "--output", out, "--dim", "10", "--epochs", epochs});
  };
  const auto a = train(dir_.file("a.vec"), "10");
  const auto b = train(dir_.file("b.vec"), "10");
  const auto one = train(dir_.file("c.vec"), "1");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(slurp(dir_.file("a.vec")), slurp(dir_.file("b.vec")));
  EXPECT_LT(std::stod(field(a.out, "final_loss")), std::stod(field(one.out, "final_loss")));

  const auto text = lines(slurp(dir_.file("a.vec")));
  std::size_t rows = 0;
  bool header_seen = false;
  for (const auto& line : text) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      EXPECT_EQ(line, "5 10");
      header_seen = true;
      continue;
    }
    std::istringstream in(line);
    std::string tok;
    std::size_t fields = 0;
    while (in >> tok) ++fields;
    EXPECT_EQ(fields, 11u);
    ++rows;
  }
  EXPECT_EQ(rows, 5u);
}

TEST_F(CliTest, TrainEmbeddingsFromCorpusMatchesTwoStep) {
  const auto toy = testing_util::data_path("toy_cyclic.txt");
  ASSERT_EQ(run({"cooccur", "--corpus", toy, "--output", dir_.file("x.bin"), "--vocab-output",
                 dir_.file("vocab.tsv")})
                .code,
            0);
  ASSERT_EQ(run({"train-embeddings", "--cooccur", dir_.file("x.bin"), "--vocab",
                 dir_.file("vocab.tsv"), "--output", dir_.file("a.vec"), "--dim", "4",
                 "--epochs", "3"})
                .code,
            0);
  ASSERT_EQ(run({"train-embeddings", "--corpus", toy, "--output", dir_.file("b.vec"), "--dim",
                 "4", "--epochs", "3"})
                .code,
            0);
  EXPECT_EQ(slurp(dir_.file("a.vec")), slurp(dir_.file("b.vec")));
}

class CliVectorsTest : public CliTest {
 protected:
  std::string write_vectors_file(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    VectorTable t(rows[0].second.size());
    for (const auto& [w, v] : rows) t.add(w, v);
    const auto path = dir_.file("v" + std::to_string(counter_++) + ".vec");
    write_vectors(std::filesystem::path(path), t);
    return path;
  }
  int counter_ = 0;
};

TEST_F(CliVectorsTest, NeighborsDuplicateVector) {
  const auto path = write_vectors_file({{"a", {1, 2}}, {"b", {2, -1}}, {"twin", {1, 2}}});
  const auto r = run({"neighbors", "--embeddings", path, "--query", "a", "--k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("twin (1.000000)"), std::string::npos);
  EXPECT_EQ(run({"neighbors", "--embeddings", path, "--query", "nope"}).code, 2);
}

TEST_F(CliVectorsTest, Analogy) {
  const auto path = write_vectors_file({{"man", {1, 0, 0.5}},
                                        {"king", {1, 1, 0.5}},
                                        {"woman", {0, 0.2, 2}},
                                        {"queen", {0, 1.2, 2}},
                                        {"noise", {0.5, -1, 0}}});
  auto first = [](const std::string& out) { return lines(out).at(1); };
  const auto same = run({"analogy", "--embeddings", path, "--a", "man", "--b", "man", "--c",
                         "woman", "--k", "1"});
  ASSERT_EQ(same.code, 0) << same.err;
  EXPECT_EQ(first(same.out), "woman (1.000000)");
  const auto para = run({"analogy", "--embeddings", path, "--a", "man", "--b", "king", "--c",
                         "woman", "--exclude-queries"});
  EXPECT_EQ(first(para.out), "queen (1.000000)");
}

TEST_F(CliVectorsTest, EvalPerfectRatingsAndByPos) {
  // Ratings equal to the cosines.
  const auto path = write_vectors_file(
      {{"a", {1, 0}}, {"b", {std::cos(0.4), std::sin(0.4)}}, {"c", {std::cos(1.0), std::sin(1.0)}},
       {"d", {std::cos(1.3), std::sin(1.3)}}});
  std::ostringstream ds;
  ds << "a\tb\t" << std::cos(0.4) << "\tn\na\tc\t" << std::cos(1.0) << "\tn\na\td\t"
     << std::cos(1.3) << "\tv\nb\td\t" << std::cos(0.9) << "\tv\nc\td\t" << std::cos(0.3)
     << "\tv\n";
  const auto dataset = dir_.write("ds.tsv", ds.str());
  const auto r = run({"eval", "--embeddings", path, "--dataset", dataset, "--by-pos", "--csv",
                      dir_.file("out.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "harmonic"), "1.000000");
  EXPECT_EQ(field(r.out, "coverage"), "1.000000");
  EXPECT_NE(r.out.find("category.n.harmonic"), std::string::npos);
  EXPECT_NE(r.out.find("category.v.harmonic"), std::string::npos);
  ASSERT_EQ(run({"eval", "--embeddings", path, "--dataset", dataset, "--csv",
                 dir_.file("out.csv")})
                .code,
            0);
  EXPECT_EQ(lines(slurp(dir_.file("out.csv"))).size(), 3u);  // header + 2 rows
}

TEST_F(CliVectorsTest, WeightedMatchesUnweightedOnUniformProbabilities) {
  // Two-letter words over a BPE model without merges; every piece has the
  // same probability, so weighting scales all vectors equally.
  const auto vec = write_vectors_file({{"a", {1, 0.2, 0}},
                                       {"b", {0.1, 1, 0.3}},
                                       {"c", {-0.4, 0.2, 1}},
                                       {"d", {0.5, -0.5, 0.5}}});
  const auto model = dir_.write("m.txt", "#bpe v1 eow=</w>\n");
  dir_.write("m.txt.vocab", "</w>\t0\na\t1\nb\t2\nc\t3\nd\t4\n");
  const auto counts = dir_.write("counts.tsv", "a\t5\nb\t5\nc\t5\nd\t5\n");
  const auto dataset =
      dir_.write("ds.tsv", "ab\tcd\t3\nab\tba\t9\nac\tbd\t5\nad\tdc\t2\ncb\tdd\t4\n");
  const auto plain = run({"eval", "--embeddings", vec, "--dataset", dataset, "--model", model,
                          "--method", "unweighted"});
  const auto weighted = run({"eval", "--embeddings", vec, "--dataset", dataset, "--model", model,
                             "--counts", counts, "--method", "weighted"});
  ASSERT_EQ(plain.code, 0) << plain.err;
  ASSERT_EQ(weighted.code, 0) << weighted.err;
  EXPECT_EQ(field(plain.out, "spearman"), field(weighted.out, "spearman"));
  EXPECT_EQ(field(plain.out, "tokenizer"), "bpe");
}

TEST_F(CliTest, ConfigFileWithOverride) {
  const auto cfg = dir_.write("run.cfg",
                              "# defaults\nmethod = bpe\nvocab_size = 18\ncorpus = " + corpus_ +
                                  "\noutput = " + dir_.file("cfg.txt") + "\n");
  const auto r = run({"train-tokenizer", "--config", cfg, "--vocab-size", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "vocab_size"), "20");
  EXPECT_EQ(run({"train-tokenizer", "--config", dir_.file("missing.cfg")}).code, 2);
}

TEST_F(CliTest, BenchCsvRows) {
  const auto r = run({"bench", "--corpus", corpus_, "--vocab-sizes", "20", "--methods", "bpe",
                      "--sentences", "3", "--repeats", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].rfind("# hardware:", 0), 0u);
  EXPECT_EQ(rows[1], "method,vocab_size,sentence_count,wall_time_seconds,peak_pieces,repeat");
  EXPECT_EQ(rows[2].rfind("bpe,20,3,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("bpe,20,3,", 0), 0u);
  EXPECT_EQ(rows[3].substr(rows[3].size() - 2), ",2");
  EXPECT_EQ(run({"bench", "--corpus", corpus_, "--sentences", "100"}).code, 2);
}

}  // namespace
}  // namespace subtok
