// poolbench: LIAR ingestion, pseudo-embedding, training, evaluation, sweeps,
// grids and reports from one binary.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "poolbench/corpus.hpp"
#include "poolbench/embedding.hpp"
#include "poolbench/errors.hpp"
#include "poolbench/experiment.hpp"
#include "poolbench/heads/model_io.hpp"
#include "poolbench/metrics.hpp"
#include "poolbench/report.hpp"

namespace fs = std::filesystem;
using namespace poolbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct CorpusOptions {
  std::string dir;
  int labels = 3;
  std::uint64_t seed = 42;
};

struct ModelOptions {
  std::string embeddings = "pseudo:32";
  std::string head = "logreg";
  std::string reg = "l2";
  double lambda = 1e-4;
  int epochs = 5;
  int batch_size = 32;
  double lr = 0.001;
  double dropout_keep = 0.8;
  std::string optimizer = "adam";
  std::size_t kernel_width = 3;
  std::size_t filters = 100;
  std::size_t hidden = 64;
  std::size_t pad_len = 40;
};

void add_corpus_options(CLI::App* cmd, CorpusOptions& o) {
  cmd->add_option("--dir", o.dir, "directory holding train.tsv, valid.tsv, test.tsv")
      ->envname("POOLBENCH_DATA_DIR")
      ->required();
  cmd->add_option("--labels", o.labels, "label scheme")->check(CLI::IsMember({3, 6}));
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
}

void add_train_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--reg", o.reg, "regularization for linear heads")
      ->check(CLI::IsMember({"l1", "l2"}));
  cmd->add_option("--lambda", o.lambda, "regularization strength")->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "training epochs")->capture_default_str();
  cmd->add_option("--batch-size", o.batch_size, "mini-batch size")->capture_default_str();
  cmd->add_option("--lr", o.lr, "learning rate")->capture_default_str();
  cmd->add_option("--dropout-keep", o.dropout_keep, "dropout keep probability (neural heads)")
      ->capture_default_str();
  cmd->add_option("--optimizer", o.optimizer, "adam or sgd")->check(CLI::IsMember({"adam", "sgd"}));
  cmd->add_option("--kernel-width", o.kernel_width, "CNN kernel width")->capture_default_str();
  cmd->add_option("--filters", o.filters, "CNN filter count")->capture_default_str();
  cmd->add_option("--hidden", o.hidden, "BiLSTM hidden size")->capture_default_str();
}

ExperimentConfig base_config(const CorpusOptions& c, const ModelOptions& m) {
  ExperimentConfig cfg;
  cfg.embedding_source = m.embeddings;
  cfg.labels = c.labels;
  cfg.head = parse_head(m.head);
  cfg.reg = {parse_reg_kind(m.reg), m.lambda};
  cfg.train.learning_rate = m.lr;
  cfg.train.epochs = m.epochs;
  cfg.train.batch_size = m.batch_size;
  cfg.train.dropout_keep = m.dropout_keep;
  cfg.train.optimizer = parse_optimizer(m.optimizer);
  cfg.train.seed = c.seed;
  cfg.cnn = {m.kernel_width, m.filters};
  cfg.bilstm = {m.hidden};
  return cfg;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

void write_outputs(const std::string& out_dir, const std::string& stem, const Report& report,
                   const std::vector<RunResult>& runs, bool timing) {
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / (stem + ".txt"), report.text);
  write_file(fs::path(out_dir) / (stem + ".csv"), report.csv);
  std::string log;
  for (const auto& r : runs) log += run_result_to_json(r, timing) + "\n";
  write_file(fs::path(out_dir) / "runs.jsonl", log);
  std::cerr << "wrote " << stem << ".txt, " << stem << ".csv and runs.jsonl to " << out_dir << "\n";
}

Corpus load_corpus(const CorpusOptions& o) {
  std::cerr << "loading corpus from " << o.dir << "\n";
  auto corpus = Corpus::load_dir(o.dir);
  const auto t = tally(corpus);
  std::cerr << "  " << corpus.size() << " statements (train " << t.split_total(Split::kTrain)
            << ", valid " << t.split_total(Split::kValid) << ", test "
            << t.split_total(Split::kTest) << ")\n";
  return corpus;
}

EmbeddingStore load_store(const std::string& source, const Corpus& corpus) {
  std::cerr << "embeddings: " << source << "\n";
  return resolve_embeddings(source, corpus);
}

int cmd_ingest(const CorpusOptions& o, bool summary) {
  const auto corpus = load_corpus(o);
  const auto t = tally(corpus);
  const std::size_t cited_splits[] = {10269, 1284, 1238};
  bool cited_match = true;
  for (auto s : kAllSplits) {
    cited_match = cited_match && t.split_total(s) == cited_splits[static_cast<int>(s)];
  }
  if (!cited_match && corpus.size() > 5000) {
    std::cerr << "note: split sizes differ from the commonly cited 10269/1284/1238\n";
  }
  std::cout << "# seed=" << o.seed << " labels=" << o.labels << "\n";
  if (summary) {
    std::cout << render_tally(t, o.labels);
  } else {
    std::cout << csv_row({"split", "label", "count"});
    for (auto s : kAllSplits) {
      for (auto f : kAllFineLabels) {
        std::cout << csv_row({std::string(split_name(s)), std::string(fine_label_name(f)),
                              std::to_string(t.counts[static_cast<int>(s)][static_cast<int>(f)])});
      }
    }
  }
  return kExitOk;
}

int cmd_pseudo_embed(const CorpusOptions& o, std::size_t dim, const std::string& out) {
  const auto corpus = load_corpus(o);
  const auto store = pseudo_store(corpus, dim);
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + out);
  const auto bytes = write_steb(store, f);
  std::cout << "{\"out\":" << nlohmann::json(out).dump() << ",\"dim\":" << dim
            << ",\"records\":" << store.size() << ",\"bytes\":" << bytes << ",\"seed\":" << o.seed
            << "}\n";
  return kExitOk;
}

ExperimentConfig single_config(const CorpusOptions& c, const ModelOptions& m,
                               const std::optional<std::string>& pooling, bool pad_given) {
  ExperimentConfig cfg = base_config(c, m);
  if (pooling && pad_given) throw ConfigError("--pooling and --pad-len are mutually exclusive");
  if (pooling) {
    cfg.aggregation = Aggregation::pooled(parse_pool_mode(*pooling));
  } else if (pad_given || is_sequence_head(cfg.head)) {
    cfg.aggregation = Aggregation::pad(m.pad_len);
  } else {
    cfg.aggregation = Aggregation::pooled(PoolMode::kMax);
  }
  cfg.validate();
  return cfg;
}

struct Featurized {
  std::vector<FeatureVector> pooled;
  std::vector<PaddedMatrix> padded;
  std::vector<std::size_t> labels;
};

Featurized featurize(const Corpus& corpus, const EmbeddingStore& store,
                     const ExperimentConfig& cfg, Split split) {
  Featurized out;
  for (const Statement* s : corpus.split(split)) {
    const auto* m = store.find(s->id);
    if (m == nullptr) throw DataError("no embedding for statement " + s->id);
    if (cfg.aggregation.padded) {
      out.padded.push_back(pad(*m, cfg.aggregation.length));
    } else {
      out.pooled.push_back(pool(*m, cfg.aggregation.mode));
    }
    out.labels.push_back(class_index(*s, cfg.labels));
  }
  if (out.labels.empty()) throw DataError(std::string(split_name(split)) + " split is empty");
  return out;
}

std::vector<std::size_t> predict(const AnyModel& model, const Featurized& data) {
  std::vector<std::size_t> out;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          if (data.pooled.empty()) throw ConfigError("linear model needs pooled features");
          for (const auto& x : data.pooled) out.push_back(m.predict(x.values));
        } else {
          if (data.padded.empty()) throw ConfigError("sequence model needs padded input");
          for (const auto& x : data.padded) out.push_back(m.predict(x));
        }
      },
      model);
  return out;
}

int cmd_train(const CorpusOptions& c, const ModelOptions& m, const std::optional<std::string>& pooling,
              bool pad_given, const std::string& out) {
  const auto cfg = single_config(c, m, pooling, pad_given);
  const auto corpus = load_corpus(c);
  const auto store = load_store(cfg.embedding_source, corpus);
  const auto train = featurize(corpus, store, cfg, Split::kTrain);
  const auto classes = static_cast<std::size_t>(cfg.labels);
  std::cerr << "training " << head_name(cfg.head) << " on " << train.labels.size()
            << " statements (" << cfg.aggregation.name() << ")\n";
  const auto model = [&]() -> AnyModel {
    switch (cfg.head) {
      case HeadKind::kLogReg:
      case HeadKind::kSvm:
        return train_linear(train.pooled, train.labels, classes, cfg.train, cfg.reg,
                            cfg.head == HeadKind::kLogReg ? LinearLoss::kSoftmaxCe
                                                          : LinearLoss::kHingeOvr);
      case HeadKind::kCnn:
        return train_cnn(train.padded, train.labels, classes, cfg.train, cfg.cnn);
      case HeadKind::kBiLstm:
        return train_bilstm(train.padded, train.labels, classes, cfg.train, cfg.bilstm);
    }
    throw ConfigError("unknown head");
  }();
  save_model_file(model, out);
  const double train_acc = accuracy(predict(model, train), train.labels);
  nlohmann::ordered_json j;
  j["fingerprint"] = cfg.fingerprint();
  j["seed"] = cfg.train.seed;
  j["head"] = head_name(cfg.head);
  j["aggregation"] = cfg.aggregation.name();
  j["labels"] = cfg.labels;
  j["train_size"] = train.labels.size();
  j["train_accuracy"] = train_acc;
  j["model"] = out;
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_eval(const CorpusOptions& c, const ModelOptions& m, const std::optional<std::string>& pooling,
             bool pad_given, const std::string& model_path) {
  const auto cfg = single_config(c, m, pooling, pad_given);
  const auto corpus = load_corpus(c);
  const auto store = load_store(cfg.embedding_source, corpus);
  RunResult r;
  if (model_path.empty()) {
    r = run_experiment(corpus, store, cfg);
  } else {
    const auto model = load_model_file(model_path);
    const auto test = featurize(corpus, store, cfg, Split::kTest);
    const auto pred = predict(model, test);
    const auto classes = static_cast<std::size_t>(cfg.labels);
    r.fingerprint = cfg.fingerprint();
    r.config = cfg;
    r.seed = cfg.train.seed;
    r.accuracy = accuracy(pred, test.labels);
    r.macro_f1 = macro_f1(pred, test.labels, classes);
    const auto scores = class_scores(pred, test.labels, classes);
    r.precision = scores.precision;
    r.recall = scores.recall;
    std::vector<std::size_t> counts(classes, 0);
    for (auto y : test.labels) ++counts[y];
    r.majority_baseline = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                          static_cast<double>(test.labels.size());
    r.test_size = test.labels.size();
  }
  std::cerr << "accuracy " << r.accuracy << ", macro-F1 " << r.macro_f1 << ", majority baseline "
            << r.majority_baseline << "\n";
  std::cout << run_result_to_json(r) << "\n";
  return kExitOk;
}

int cmd_sweep(const CorpusOptions& c, const ModelOptions& m, const std::string& lengths_text,
              const std::string& out_dir, bool timing) {
  ExperimentConfig base = base_config(c, m);
  if (!is_sequence_head(base.head)) {
    throw ConfigError("sweep needs --head cnn or --head bilstm");
  }
  std::vector<std::size_t> lengths;
  for (const auto& s : split_list(lengths_text)) {
    try {
      lengths.push_back(static_cast<std::size_t>(std::stoul(s)));
    } catch (const std::exception&) {
      throw ConfigError("bad length '" + s + "' in --lengths");
    }
  }
  base.aggregation = Aggregation::pad(lengths.empty() ? 40 : lengths.front());
  base.validate();
  const auto corpus = load_corpus(c);
  const auto store = load_store(base.embedding_source, corpus);
  const auto rows = sweep_lengths(corpus, store, base, lengths);
  std::vector<RunResult> runs;
  for (const auto& r : rows) {
    std::cerr << "  L=" << r.length << " accuracy " << r.accuracy << " (" << r.run.wall_time
              << " s)\n";
    runs.push_back(r.run);
  }
  const auto report = render_report(runs, ReportShape::kSweep);
  std::cout << "# seed=" << c.seed << "\n" << report.text;
  write_outputs(out_dir, "sweep", report, runs, timing);
  return kExitOk;
}

int cmd_grid(const CorpusOptions& c, const ModelOptions& m, const std::string& embeddings,
             const std::string& poolings, const std::string& heads, std::size_t pad_len,
             unsigned jobs, const std::string& shape_text, const std::string& out_dir,
             bool timing) {
  std::vector<ExperimentConfig> configs;
  const auto sources = split_list(embeddings);
  const auto head_list = split_list(heads);
  if (sources.empty()) throw ConfigError("--embeddings needs at least one source");
  if (head_list.empty()) throw ConfigError("--heads needs at least one head");
  std::vector<PoolMode> modes;
  for (const auto& p : split_list(poolings)) modes.push_back(parse_pool_mode(p));
  bool all_linear = true;
  for (const auto& source : sources) {
    for (const auto& h : head_list) {
      ModelOptions mo = m;
      mo.embeddings = source;
      mo.head = h;
      ExperimentConfig cfg = base_config(c, mo);
      if (is_sequence_head(cfg.head)) {
        all_linear = false;
        cfg.aggregation = Aggregation::pad(pad_len);
        cfg.validate();
        configs.push_back(cfg);
      } else {
        if (modes.empty()) throw ConfigError("linear heads need --pooling");
        for (auto mode : modes) {
          cfg.aggregation = Aggregation::pooled(mode);
          cfg.validate();
          configs.push_back(cfg);
        }
      }
    }
  }
  const ReportShape shape = shape_text.empty()
                                ? (all_linear ? ReportShape::kRq1 : ReportShape::kRq3)
                                : parse_report_shape(shape_text);
  const auto corpus = load_corpus(c);
  std::map<std::string, EmbeddingStore, std::less<>> stores;
  for (const auto& source : sources) {
    if (!stores.contains(source)) stores.emplace(source, load_store(source, corpus));
  }
  std::cerr << "running " << configs.size() << " cells with " << jobs << " job(s)\n";
  const auto runs = run_grid(corpus, stores, configs, jobs);
  const auto report = render_report(runs, shape);
  std::cout << "# seed=" << c.seed << " cells=" << runs.size() << "\n" << report.text;
  write_outputs(out_dir, std::string(report_shape_name(shape)), report, runs, timing);
  return kExitOk;
}

int cmd_report(const std::string& runs_path, const std::string& shape_text, bool csv,
               const std::string& out_dir) {
  std::ifstream in(runs_path);
  if (!in) throw DataError("cannot open " + runs_path);
  const auto runs = read_run_log(in);
  const auto shape = parse_report_shape(shape_text);
  const auto report = render_report(runs, shape);
  if (csv) {
    std::cout << report.csv;
  } else {
    std::set<std::uint64_t> seeds;
    for (const auto& r : runs) seeds.insert(r.seed);
    std::cout << "# seeds=";
    for (auto it = seeds.begin(); it != seeds.end(); ++it) {
      std::cout << (it == seeds.begin() ? "" : ",") << *it;
    }
    std::cout << "\n" << report.text;
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / (std::string(report_shape_name(shape)) + ".txt"), report.text);
    write_file(fs::path(out_dir) / (std::string(report_shape_name(shape)) + ".csv"), report.csv);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"poolbench: frozen-embedding veracity classification benchmark"};
  app.require_subcommand(1);

  CorpusOptions corpus_opts;
  ModelOptions model_opts;
  std::optional<std::string> pooling;
  std::string out, model_path, lengths = "15,20,25,30,35,40", runs_path, shape;
  std::string pooling_list = "max,avg,min", heads = "logreg,svm";
  std::size_t dim = 32;
  unsigned jobs = 1;
  bool summary = false, csv = false, timing = false;

  auto* ingest = app.add_subcommand("ingest", "load the LIAR splits and print label tallies");
  add_corpus_options(ingest, corpus_opts);
  ingest->add_flag("--summary", summary, "aligned table instead of CSV");

  auto* pseudo = app.add_subcommand("pseudo-embed", "write deterministic pseudo embeddings as STEB");
  add_corpus_options(pseudo, corpus_opts);
  pseudo->add_option("--dim", dim, "embedding width")->check(CLI::PositiveNumber);
  pseudo->add_option("--out", out, "output STEB file")->required();

  CLI::Option* pad_opt_train = nullptr;
  CLI::Option* pad_opt_eval = nullptr;
  auto* train = app.add_subcommand("train", "train one head on the train split and save it");
  add_corpus_options(train, corpus_opts);
  add_train_options(train, model_opts);
  train->add_option("--embeddings", model_opts.embeddings, "STEB path or pseudo:<dim>");
  train->add_option("--head", model_opts.head, "logreg, svm, cnn or bilstm");
  train->add_option("--pooling", pooling, "max, avg or min (linear heads)");
  pad_opt_train = train->add_option("--pad-len", model_opts.pad_len, "padded length (neural heads)");
  train->add_option("--out", out, "model output path")->required();

  auto* eval = app.add_subcommand("eval", "run one experiment (or score a saved model) on test");
  add_corpus_options(eval, corpus_opts);
  add_train_options(eval, model_opts);
  eval->add_option("--embeddings", model_opts.embeddings, "STEB path or pseudo:<dim>");
  eval->add_option("--head", model_opts.head, "logreg, svm, cnn or bilstm");
  eval->add_option("--pooling", pooling, "max, avg or min (linear heads)");
  pad_opt_eval = eval->add_option("--pad-len", model_opts.pad_len, "padded length (neural heads)");
  eval->add_option("--model", model_path, "score this saved model instead of training");

  auto* sweep = app.add_subcommand("sweep", "accuracy vs. padded sequence length");
  add_corpus_options(sweep, corpus_opts);
  add_train_options(sweep, model_opts);
  sweep->add_option("--embeddings", model_opts.embeddings, "STEB path or pseudo:<dim>");
  sweep->add_option("--head", model_opts.head, "cnn or bilstm")->required();
  sweep->add_option("--lengths", lengths, "ascending comma-separated lengths")->capture_default_str();
  sweep->add_option("--out", out, "results directory");
  sweep->add_flag("--record-timing", timing, "include wall_time in runs.jsonl");

  auto* grid = app.add_subcommand("grid", "embedding x aggregation x head grid");
  add_corpus_options(grid, corpus_opts);
  add_train_options(grid, model_opts);
  grid->add_option("--embeddings", model_opts.embeddings, "comma-separated sources");
  grid->add_option("--pooling", pooling_list, "pooling modes for linear heads")->capture_default_str();
  grid->add_option("--heads", heads, "comma-separated heads")->capture_default_str();
  grid->add_option("--pad-len", model_opts.pad_len, "padded length for neural heads")
      ->capture_default_str();
  grid->add_option("--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);
  grid->add_option("--shape", shape, "rq1 or rq3 (default: rq1 for linear-only grids)");
  grid->add_option("--out", out, "results directory");
  grid->add_flag("--record-timing", timing, "include wall_time in runs.jsonl");

  auto* report = app.add_subcommand("report", "render a report from a runs.jsonl log");
  report->add_option("--runs", runs_path, "runs.jsonl")->required();
  report->add_option("--shape", shape, "rq1, rq3 or sweep")->required();
  report->add_flag("--csv", csv, "print CSV instead of the aligned table");
  report->add_option("--out", out, "also write <shape>.txt/.csv here");
  report->add_option("--seed", corpus_opts.seed, "accepted for uniformity; unused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(corpus_opts, summary);
    if (pseudo->parsed()) return cmd_pseudo_embed(corpus_opts, dim, out);
    if (train->parsed()) {
      return cmd_train(corpus_opts, model_opts, pooling, pad_opt_train->count() > 0, out);
    }
    if (eval->parsed()) {
      return cmd_eval(corpus_opts, model_opts, pooling, pad_opt_eval->count() > 0, model_path);
    }
    if (sweep->parsed()) return cmd_sweep(corpus_opts, model_opts, lengths, out, timing);
    if (grid->parsed()) {
      return cmd_grid(corpus_opts, model_opts, model_opts.embeddings, pooling_list, heads,
                      model_opts.pad_len, jobs, shape, out, timing);
    }
    if (report->parsed()) return cmd_report(runs_path, shape, csv, out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
