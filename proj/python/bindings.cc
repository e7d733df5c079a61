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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "subtok/bpe.h"
#include "subtok/cli.h"
#include "subtok/compose.h"
#include "subtok/corpus.h"
#include "subtok/error.h"
#include "subtok/eval.h"
#include "subtok/glove.h"
#include "subtok/unigram.h"
#include "subtok/vectors.h"

namespace py = pybind11;
using namespace subtok;

namespace {

TokenFrequencyTable to_table(const std::map<std::string, std::uint64_t>& counts) {
  TokenFrequencyTable t;
  for (const auto& [k, v] : counts) t.add(k, v);
  return t;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows, m.cols});
  std::copy(m.data.begin(), m.data.end(), out.mutable_data());
  return out;
}

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw InputError("expected a 2-d array");
  Matrix m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.data.begin());
  return m;
}

VectorTable to_vector_table(const std::vector<std::string>& labels,
                            const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  const Matrix m = to_matrix(a);
  if (m.rows != labels.size()) throw InputError("one label per row required");
  VectorTable t(m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) t.add(labels[i], m.row(i));
  return t;
}

py::array_t<double> rows_to_array(const VectorTable& t) {
  py::array_t<double> out({t.size(), t.dim()});
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::copy(t.row(i).begin(), t.row(i).end(), out.mutable_data() + i * t.dim());
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_subtok, m) {
  m.doc() = "Subword tokenisers, GloVe embeddings, composition and similarity evaluation";

  // Later registrations are tried first, so the subclass goes last.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("normalize",
        [](const std::string& text, std::size_t max_len, bool lowercase, bool nfkc) {
          NormalizationConfig c;
          c.max_sentence_length = max_len;
          c.lowercase = lowercase;
          c.nfkc = nfkc;
          return normalize(text, c);
        },
        py::arg("text"), py::arg("max_sentence_length") = 16384, py::arg("lowercase") = false,
        py::arg("nfkc") = false);

  // BPE
  py::class_<BpeModel>(m, "BpeModel")
      .def_property_readonly("initial_symbols", &BpeModel::initial_symbols)
      .def_property_readonly("merges",
                             [](const BpeModel& b) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& r : b.merges()) out.emplace_back(r.left, r.right);
                               return out;
                             })
      .def("vocabulary", &BpeModel::vocabulary)
      .def("vocab_size", &BpeModel::vocab_size)
      .def("encode", [](const BpeModel& b, const std::string& w) { return b.encode(w); })
      .def("tokenize",
           [](const BpeModel& b, const std::string& sentence) {
             const auto words = split_whitespace(sentence);
             return tokenize_sentence_bpe(b, words);
           })
      .def("decode", [](const BpeModel& b, const std::vector<std::string>& pieces) {
        return decode_bpe(b, pieces);
      })
      .def("save",
           [](const BpeModel& b, const std::filesystem::path& path) {
             std::ofstream merges(path), vocab(path.string() + ".vocab");
             b.save_merges(merges);
             b.save_vocab(vocab);
           })
      .def_static("load", py::overload_cast<const std::filesystem::path&>(&BpeModel::load));

  m.def("train_bpe",
        [](const std::vector<std::string>& sentences, std::size_t num_merges,
           bool sentence_as_word) {
          BpeTrainLog log;
          auto model = train_bpe(bpe_training_words(sentences, sentence_as_word), num_merges, {},
                                 &log);
          py::dict info;
          info["merges_performed"] = log.merges_performed;
          info["stopped_early"] = log.stopped_early;
          info["stop_reason"] = log.stop_reason;
          return py::make_tuple(std::move(model), info);
        },
        py::arg("sentences"), py::arg("num_merges"), py::arg("sentence_as_word") = false,
        "Train on whitespace-split sentences; returns (model, log dict).");

  // Unigram
  py::class_<UnigramModel>(m, "UnigramModel")
      .def(py::init<std::vector<std::pair<std::string, double>>>(), py::arg("pieces"))
      .def("__len__", &UnigramModel::size)
      .def("__contains__", &UnigramModel::contains)
      .def("log_prob", &UnigramModel::log_prob)
      .def("pieces", &UnigramModel::pieces)
      .def("probability_mass", &UnigramModel::probability_mass)
      .def("viterbi",
           [](const UnigramModel& u, const std::string& text) { return viterbi_segment(u, text); })
      .def("expected_counts",
           [](const UnigramModel& u, const std::string& text) {
             const auto ec = expected_counts(u, text);
             std::map<std::string, double> counts(ec.counts.begin(), ec.counts.end());
             return py::make_tuple(counts, ec.log_marginal);
           })
      .def("encode",
           [](const UnigramModel& u, const std::string& sentence) {
             return encode_unigram(u, sentence);
           })
      .def_static("decode",
                  [](const std::vector<std::string>& pieces) { return decode_unigram(pieces); })
      .def("save",
           [](const UnigramModel& u, const std::filesystem::path& path) {
             std::ofstream out(path);
             u.save(out);
           })
      .def_static("load", py::overload_cast<const std::filesystem::path&>(&UnigramModel::load));

  m.def("train_unigram",
        [](const std::vector<std::string>& sentences, std::size_t vocab_size,
           std::size_t seed_size, std::size_t max_piece_len, double shrink, int threads) {
          UnigramTrainConfig c;
          c.seed_size = seed_size;
          c.max_piece_len = max_piece_len;
          c.shrink_factor = shrink;
          c.threads = threads;
          py::gil_scoped_release release;
          return train_unigram(sentences, vocab_size, c);
        },
        py::arg("sentences"), py::arg("vocab_size"), py::arg("seed_size") = 0,
        py::arg("max_piece_len") = 16, py::arg("shrink") = 0.75, py::arg("threads") = 1);

  // GloVe
  m.def("train_glove",
        [](const std::vector<std::string>& tokenised, std::size_t dim, int epochs,
           std::size_t window, double x_max, double alpha, double lr, std::uint64_t seed,
           std::uint64_t min_count) {
          TrainConfig c;
          c.dim = dim;
          c.epochs = epochs;
          c.window = window;
          c.x_max = x_max;
          c.alpha = alpha;
          c.learning_rate = lr;
          c.seed = seed;
          const auto vocab = TokenVocabulary::from_counts(count_words(tokenised), min_count);
          const auto table = build_cooccurrence(tokenised, vocab, window);
          std::vector<double> losses;
          const VectorTable exported = train_glove(table, vocab.tokens(), c, &losses).exported();
          return py::make_tuple(exported.labels(), rows_to_array(exported), losses);
        },
        py::arg("sentences"), py::arg("dim") = 50, py::arg("epochs") = 25,
        py::arg("window") = 15, py::arg("x_max") = 100.0, py::arg("alpha") = 0.75,
        py::arg("learning_rate") = 0.05, py::arg("seed") = 1, py::arg("min_count") = 1,
        "Returns (tokens, vectors W + W~, per-epoch mean loss).");
  m.def("glove_weight", &glove_weight, py::arg("x"), py::arg("x_max"), py::arg("alpha"));

  // Composition
  m.def("sif_weight", &sif_weight, py::arg("p"), py::arg("a"));
  m.def("first_principal_component",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> a) {
          return first_principal_component(to_matrix(a));
        });
  m.def("remove_first_pc", [](py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    return to_array(remove_first_pc(to_matrix(a)));
  });

  // Evaluation
  m.def("cosine", [](const std::vector<double>& u, const std::vector<double>& v) {
    return cosine(u, v);
  });
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(x, y);
  });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
    return spearman(x, y);
  });
  m.def("harmonic_mean", &harmonic_mean, py::arg("s"), py::arg("p"));
  m.def("nearest_neighbors",
        [](const std::vector<std::string>& labels,
           py::array_t<double, py::array::c_style | py::array::forcecast> vectors,
           const std::string& query, std::size_t k) {
          std::vector<std::pair<std::string, double>> out;
          for (const auto& n : nearest_neighbors(to_vector_table(labels, vectors), query, k)) {
            out.emplace_back(n.token, n.cosine);
          }
          return out;
        },
        py::arg("labels"), py::arg("vectors"), py::arg("query"), py::arg("k") = 10);
  m.def("evaluate_similarity",
        [](const std::filesystem::path& dataset, const std::vector<std::string>& labels,
           py::array_t<double, py::array::c_style | py::array::forcecast> vectors) {
          const auto report =
              evaluate_similarity(SimilarityDataset::load(dataset), to_vector_table(labels, vectors));
          py::dict d;
          d["spearman"] = report.spearman;
          d["pearson"] = report.pearson;
          d["harmonic"] = report.harmonic;
          d["pairs_total"] = report.pairs_total;
          d["pairs_scored"] = report.pairs_scored;
          d["coverage"] = report.coverage();
          return d;
        },
        py::arg("dataset"), py::arg("labels"), py::arg("vectors"));

  // Command line
  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::vector<std::string> argv = {"subtok"};
          argv.insert(argv.end(), args.begin(), args.end());
          std::ostringstream out, err;
          int code;
          {
            py::gil_scoped_release release;
            code = cli::run(argv, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a subcommand in-process; returns (exit code, stdout, stderr).");
}
