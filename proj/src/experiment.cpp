#include "poolbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "poolbench/errors.hpp"
#include "poolbench/heads/linear.hpp"
#include "poolbench/metrics.hpp"

namespace poolbench {

std::string_view head_name(HeadKind head) {
  switch (head) {
    case HeadKind::kLogReg: return "logreg";
    case HeadKind::kSvm: return "svm";
    case HeadKind::kBiLstm: return "bilstm";
    case HeadKind::kCnn: return "cnn";
  }
  return "?";
}

std::string_view head_title(HeadKind head) {
  switch (head) {
    case HeadKind::kLogReg: return "LR";
    case HeadKind::kSvm: return "SVM";
    case HeadKind::kBiLstm: return "Bi-LSTM";
    case HeadKind::kCnn: return "CNN";
  }
  return "?";
}

HeadKind parse_head(std::string_view text) {
  for (auto h : kAllHeads) {
    if (text == head_name(h)) return h;
  }
  throw ConfigError("unknown head '" + std::string(text) + "' (expected logreg, svm, cnn or bilstm)");
}

bool is_sequence_head(HeadKind head) { return head == HeadKind::kCnn || head == HeadKind::kBiLstm; }

std::string Aggregation::name() const {
  if (padded) return "pad-" + std::to_string(length);
  return "pool-" + std::string(pool_mode_name(mode));
}

Aggregation parse_aggregation(std::string_view text) {
  if (text.starts_with("pool-")) return Aggregation::pooled(parse_pool_mode(text.substr(5)));
  if (text.starts_with("pad-")) {
    const auto digits = text.substr(4);
    std::size_t length = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), length);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || length == 0) {
      throw ConfigError("bad padded length in '" + std::string(text) + "'");
    }
    return Aggregation::pad(length);
  }
  throw ConfigError("unknown aggregation '" + std::string(text) +
                    "' (expected pool-max, pool-avg, pool-min or pad-<L>)");
}

void ExperimentConfig::validate() const {
  if (labels != 3 && labels != 6) {
    throw ConfigError("labels must be 3 or 6, got " + std::to_string(labels));
  }
  if (embedding_source.empty()) throw ConfigError("embedding source is empty");
  if (aggregation.padded && (aggregation.length < 1 || aggregation.length > kMaxPadLength)) {
    throw ConfigError("padded length must lie in [1, " + std::to_string(kMaxPadLength) + "], got " +
                      std::to_string(aggregation.length));
  }
  if (aggregation.padded != is_sequence_head(head)) {
    throw ConfigError("invalid pairing of " + aggregation.name() + " with head " +
                      std::string(head_name(head)) +
                      ": pooled features go to logreg/svm, padded sequences to cnn/bilstm");
  }
  if (head == HeadKind::kCnn) {
    if (cnn.kernel_width == 0 || cnn.filters == 0) {
      throw ConfigError("CNN kernel width and filters must be positive");
    }
    if (cnn.kernel_width > aggregation.length) {
      throw ConfigError("kernel width " + std::to_string(cnn.kernel_width) +
                        " exceeds padded length " + std::to_string(aggregation.length));
    }
  }
  if (head == HeadKind::kBiLstm && bilstm.hidden == 0) {
    throw ConfigError("LSTM hidden size must be positive");
  }
  reg.validate();
  train.validate();
}

namespace {

std::string hex_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

std::string ExperimentConfig::canonical() const {
  std::string s;
  const auto field = [&s](std::string_view key, const std::string& value) {
    s.append(key).append("=").append(value).append(";");
  };
  field("embedding", embedding_source);
  field("labels", std::to_string(labels));
  field("aggregation", aggregation.name());
  field("head", std::string(head_name(head)));
  field("reg", std::string(reg_kind_name(reg.kind)));
  field("lambda", hex_float(reg.lambda));
  field("lr", hex_float(train.learning_rate));
  field("epochs", std::to_string(train.epochs));
  field("batch", std::to_string(train.batch_size));
  field("keep", hex_float(train.dropout_keep));
  field("seed", std::to_string(train.seed));
  field("optimizer", std::string(optimizer_name(train.optimizer)));
  field("kernel", std::to_string(cnn.kernel_width));
  field("filters", std::to_string(cnn.filters));
  field("hidden", std::to_string(bilstm.hidden));
  return s;
}

std::string ExperimentConfig::fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

EmbeddingStore pseudo_store(const Corpus& corpus, std::size_t dim) {
  EmbeddingStore store(dim, "pseudo:" + std::to_string(dim));
  for (const auto& s : corpus.statements()) {
    store.add(pseudo_embed(tokenize_simple(s.text), dim, s.id));
  }
  return store;
}

EmbeddingStore resolve_embeddings(std::string_view source, const Corpus& corpus) {
  if (source.starts_with("pseudo:")) {
    const auto digits = source.substr(7);
    std::size_t dim = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), dim);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || dim == 0) {
      throw ConfigError("bad pseudo embedding spec '" + std::string(source) +
                        "' (expected pseudo:<dim>)");
    }
    return pseudo_store(corpus, dim);
  }
  return read_steb_file(std::string(source));
}

namespace {

struct SplitData {
  std::vector<const TokenEmbeddingMatrix*> matrices;
  std::vector<std::size_t> labels;
};

SplitData gather(const Corpus& corpus, const EmbeddingStore& store, Split split, int num_labels,
                 std::vector<std::string>& missing) {
  SplitData out;
  for (const Statement* s : corpus.split(split)) {
    const auto* m = store.find(s->id);
    if (m == nullptr) {
      missing.push_back(s->id);
      continue;
    }
    out.matrices.push_back(m);
    out.labels.push_back(class_index(*s, num_labels));
  }
  return out;
}

template <typename Head, typename Input>
std::vector<std::size_t> predict_all(const Head& head, const std::vector<Input>& inputs) {
  std::vector<std::size_t> out;
  out.reserve(inputs.size());
  for (const auto& x : inputs) {
    if constexpr (std::is_same_v<Input, FeatureVector>) {
      out.push_back(head.predict(x.values));
    } else {
      out.push_back(head.predict(x));
    }
  }
  return out;
}

}  // namespace

RunResult run_experiment(const Corpus& corpus, const EmbeddingStore& store,
                         const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::string> missing;
  const SplitData train = gather(corpus, store, Split::kTrain, config.labels, missing);
  const SplitData test = gather(corpus, store, Split::kTest, config.labels, missing);
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " statement(s) have no embedding:";
    for (std::size_t i = 0; i < std::min<std::size_t>(10, missing.size()); ++i) {
      msg += " " + missing[i];
    }
    if (missing.size() > 10) msg += " ...";
    throw DataError(msg);
  }
  if (train.matrices.empty()) throw DataError("train split is empty");
  if (test.matrices.empty()) throw DataError("test split is empty");

  const auto classes = static_cast<std::size_t>(config.labels);
  std::vector<std::size_t> predictions;
  if (!config.aggregation.padded) {
    const auto featurize = [&](const SplitData& d) {
      std::vector<FeatureVector> out;
      out.reserve(d.matrices.size());
      for (const auto* m : d.matrices) out.push_back(pool(*m, config.aggregation.mode));
      return out;
    };
    const auto train_x = featurize(train);
    const auto test_x = featurize(test);
    const LinearLoss loss =
        config.head == HeadKind::kLogReg ? LinearLoss::kSoftmaxCe : LinearLoss::kHingeOvr;
    const auto model = train_linear(train_x, train.labels, classes, config.train, config.reg, loss);
    predictions = predict_all(model, test_x);
  } else {
    const auto featurize = [&](const SplitData& d) {
      std::vector<PaddedMatrix> out;
      out.reserve(d.matrices.size());
      for (const auto* m : d.matrices) out.push_back(pad(*m, config.aggregation.length));
      return out;
    };
    const auto train_x = featurize(train);
    const auto test_x = featurize(test);
    if (config.head == HeadKind::kCnn) {
      const auto head = train_cnn(train_x, train.labels, classes, config.train, config.cnn);
      predictions = predict_all(head, test_x);
    } else {
      const auto head = train_bilstm(train_x, train.labels, classes, config.train, config.bilstm);
      predictions = predict_all(head, test_x);
    }
  }

  RunResult r;
  r.fingerprint = config.fingerprint();
  r.config = config;
  r.seed = config.train.seed;
  r.accuracy = accuracy(predictions, test.labels);
  r.macro_f1 = macro_f1(predictions, test.labels, classes);
  const auto scores = class_scores(predictions, test.labels, classes);
  r.precision = scores.precision;
  r.recall = scores.recall;
  std::vector<std::size_t> counts(classes, 0);
  for (auto y : test.labels) ++counts[y];
  r.majority_baseline = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                        static_cast<double>(test.labels.size());
  r.train_size = train.labels.size();
  r.test_size = test.labels.size();
  r.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SeedSummary repeat_seeds(const Corpus& corpus, const EmbeddingStore& store,
                         const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds) {
  if (seeds.size() < 2) throw ConfigError("repeat_seeds needs at least two seeds");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("repeat_seeds got duplicate seeds");
  }
  SeedSummary out;
  for (auto seed : seeds) {
    ExperimentConfig c = config;
    c.train.seed = seed;
    out.runs.push_back(run_experiment(corpus, store, c));
  }
  const auto mean_sd = [&](auto field, double& mean, double& sd) {
    const double n = static_cast<double>(out.runs.size());
    double sum = 0.0;
    for (const auto& r : out.runs) sum += field(r);
    mean = sum / n;
    double ss = 0.0;
    for (const auto& r : out.runs) ss += (field(r) - mean) * (field(r) - mean);
    sd = std::sqrt(ss / (n - 1.0));
  };
  mean_sd([](const RunResult& r) { return r.accuracy; }, out.mean_accuracy, out.stddev_accuracy);
  mean_sd([](const RunResult& r) { return r.macro_f1; }, out.mean_macro_f1, out.stddev_macro_f1);
  return out;
}

std::vector<SweepRow> sweep_lengths(const Corpus& corpus, const EmbeddingStore& store,
                                    const ExperimentConfig& base,
                                    const std::vector<std::size_t>& lengths) {
  if (!is_sequence_head(base.head)) {
    throw ConfigError("length sweeps need a cnn or bilstm head, got " +
                      std::string(head_name(base.head)));
  }
  if (lengths.empty()) throw ConfigError("length sweep needs at least one length");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (i > 0 && lengths[i] <= lengths[i - 1]) {
      throw ConfigError("sweep lengths must be strictly ascending");
    }
    if (lengths[i] < 1 || lengths[i] > kMaxPadLength) {
      throw ConfigError("sweep length " + std::to_string(lengths[i]) + " out of range");
    }
    if (base.head == HeadKind::kCnn && lengths[i] < base.cnn.kernel_width) {
      throw ConfigError("sweep length " + std::to_string(lengths[i]) +
                        " is shorter than the CNN kernel width");
    }
  }
  std::vector<SweepRow> rows;
  for (auto length : lengths) {
    ExperimentConfig c = base;
    c.aggregation = Aggregation::pad(length);
    auto run = run_experiment(corpus, store, c);
    rows.push_back({length, run.accuracy, run.macro_f1, std::move(run)});
  }
  return rows;
}

std::vector<RunResult> run_grid(const Corpus& corpus,
                                const std::map<std::string, EmbeddingStore, std::less<>>& stores,
                                const std::vector<ExperimentConfig>& configs, unsigned jobs) {
  for (const auto& c : configs) {
    c.validate();
    if (stores.find(c.embedding_source) == stores.end()) {
      throw ConfigError("no embedding store loaded for '" + c.embedding_source + "'");
    }
  }
  std::vector<RunResult> results(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run_experiment(corpus, stores.find(configs[i].embedding_source)->second,
                                    configs[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  std::stable_sort(results.begin(), results.end(),
                   [](const RunResult& a, const RunResult& b) { return a.fingerprint < b.fingerprint; });
  return results;
}

}  // namespace poolbench
