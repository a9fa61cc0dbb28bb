#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "poolbench/corpus.hpp"
#include "poolbench/embedding.hpp"
#include "poolbench/errors.hpp"
#include "poolbench/experiment.hpp"
#include "poolbench/metrics.hpp"
#include "poolbench/report.hpp"
#include "poolbench/sequence.hpp"

namespace py = pybind11;
using namespace poolbench;

namespace {

using Rows = std::vector<std::vector<double>>;

TokenEmbeddingMatrix to_matrix(const Rows& rows, const std::string& id = {}) {
  if (rows.empty()) throw ConfigError("matrix needs at least one row");
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw ConfigError("ragged matrix rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return TokenEmbeddingMatrix(id, dim, std::move(flat));
}

Rows to_rows(const std::vector<double>& flat, std::size_t dim) {
  Rows out;
  for (std::size_t i = 0; i < flat.size(); i += dim) {
    out.emplace_back(flat.begin() + static_cast<long>(i),
                     flat.begin() + static_cast<long>(i + dim));
  }
  return out;
}

py::dict statement_dict(const Statement& s) {
  py::dict d;
  d["id"] = s.id;
  d["text"] = s.text;
  d["label"] = std::string(fine_label_name(s.fine_label));
  d["split"] = std::string(split_name(s.split));
  return d;
}

}  // namespace

PYBIND11_MODULE(_poolbench, m) {
  m.doc() = "Frozen-embedding veracity classification benchmark (C++ core)";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  m.def("consolidate", [](const std::string& label) {
    return std::string(coarse_label_name(consolidate(parse_fine_label(label))));
  }, py::arg("label"), "Map a six-way LIAR label to Fake / PartiallyTrue / True.");

  m.def("parse_liar_tsv", [](const std::string& text, const std::string& split) {
    std::istringstream in(text);
    py::list out;
    for (const auto& s : parse_liar_tsv(in, parse_split(split))) out.append(statement_dict(s));
    return out;
  }, py::arg("text"), py::arg("split") = "train");

  m.def("load_corpus_tally", [](const std::filesystem::path& dir) {
    const auto t = tally(Corpus::load_dir(dir));
    py::dict splits, labels;
    for (auto s : kAllSplits) splits[py::str(std::string(split_name(s)))] = t.split_total(s);
    for (auto f : kAllFineLabels) labels[py::str(std::string(fine_label_name(f)))] = t.fine_total(f);
    py::dict d;
    d["splits"] = splits;
    d["labels"] = labels;
    return d;
  }, py::arg("dir"));

  m.def("tokenize_simple", &tokenize_simple, py::arg("text"));
  m.def("fnv1a64", [](const std::string& s) { return fnv1a64(s); }, py::arg("data"));

  m.def("pseudo_embed", [](const std::vector<std::string>& tokens, std::size_t dim) {
    return to_rows(pseudo_embed(tokens, dim).values(), dim);
  }, py::arg("tokens"), py::arg("dim"));

  m.def("pool", [](const Rows& rows, const std::string& mode) {
    return pool(to_matrix(rows), parse_pool_mode(mode)).values;
  }, py::arg("matrix"), py::arg("mode"));

  m.def("pad", [](const Rows& rows, std::size_t length) {
    const auto p = pad(to_matrix(rows), length);
    return py::make_tuple(to_rows(p.values, p.dim), p.true_length);
  }, py::arg("matrix"), py::arg("length"), "Returns (padded rows, true_length).");

  m.def("write_steb", [](const std::filesystem::path& path, std::size_t dim,
                         const std::map<std::string, Rows>& entries) {
    EmbeddingStore store(dim);
    for (const auto& [id, rows] : entries) store.add(to_matrix(rows, id));
    write_steb_file(store, path);
  }, py::arg("path"), py::arg("dim"), py::arg("entries"));

  m.def("read_steb", [](const std::filesystem::path& path) {
    const auto store = read_steb_file(path);
    py::dict entries;
    for (const auto& [id, mat] : store.entries()) {
      entries[py::str(id)] = to_rows(mat.values(), store.dim());
    }
    return py::make_tuple(store.dim(), entries);
  }, py::arg("path"), "Returns (dim, {id: rows}).");

  m.def("accuracy", [](const std::vector<std::size_t>& pred, const std::vector<std::size_t>& gold) {
    return accuracy(pred, gold);
  }, py::arg("pred"), py::arg("gold"));
  m.def("macro_f1", [](const std::vector<std::size_t>& pred, const std::vector<std::size_t>& gold,
                       std::size_t classes) { return macro_f1(pred, gold, classes); },
        py::arg("pred"), py::arg("gold"), py::arg("classes"));

  m.def("run_experiment", [](const std::filesystem::path& dir, const std::string& embeddings,
                             const std::string& aggregation, const std::string& head, int labels,
                             std::uint64_t seed, int epochs, double learning_rate, int batch_size,
                             const std::string& reg, double lam) {
    ExperimentConfig cfg;
    cfg.embedding_source = embeddings;
    cfg.aggregation = parse_aggregation(aggregation);
    cfg.head = parse_head(head);
    cfg.labels = labels;
    cfg.train.seed = seed;
    cfg.train.epochs = epochs;
    cfg.train.learning_rate = learning_rate;
    cfg.train.batch_size = batch_size;
    cfg.reg = {parse_reg_kind(reg), lam};
    cfg.validate();
    py::gil_scoped_release release;
    const auto corpus = Corpus::load_dir(dir);
    const auto store = resolve_embeddings(cfg.embedding_source, corpus);
    return run_result_to_json(run_experiment(corpus, store, cfg));
  }, py::arg("data_dir"), py::arg("embeddings") = "pseudo:32",
     py::arg("aggregation") = "pool-max", py::arg("head") = "logreg", py::arg("labels") = 3,
     py::arg("seed") = 42, py::arg("epochs") = 5, py::arg("learning_rate") = 0.001,
     py::arg("batch_size") = 32, py::arg("reg") = "l2", py::arg("lam") = 1e-4,
     "Train on the train split, score test; returns the run record as a JSON string.");

  m.def("render_report", [](const std::vector<std::string>& jsonl, const std::string& shape) {
    std::vector<RunResult> runs;
    for (const auto& line : jsonl) runs.push_back(run_result_from_json(line));
    const auto r = render_report(runs, parse_report_shape(shape));
    return py::make_tuple(r.text, r.csv);
  }, py::arg("runs"), py::arg("shape"), "Returns (text, csv) for a list of JSON run records.");
}
