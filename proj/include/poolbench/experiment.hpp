#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "poolbench/corpus.hpp"
#include "poolbench/embedding.hpp"
#include "poolbench/heads/bilstm.hpp"
#include "poolbench/heads/cnn.hpp"
#include "poolbench/heads/common.hpp"
#include "poolbench/sequence.hpp"

namespace poolbench {

enum class HeadKind { kLogReg, kSvm, kBiLstm, kCnn };

// Canonical column order of the classifier comparison table.
inline constexpr HeadKind kAllHeads[] = {HeadKind::kLogReg, HeadKind::kSvm, HeadKind::kBiLstm,
                                         HeadKind::kCnn};

std::string_view head_name(HeadKind head);
std::string_view head_title(HeadKind head);
HeadKind parse_head(std::string_view text);
bool is_sequence_head(HeadKind head);

inline constexpr std::size_t kMaxPadLength = 512;

// Either pooling (pool-max/pool-avg/pool-min) or padding to a fixed length.
struct Aggregation {
  bool padded = false;
  PoolMode mode = PoolMode::kMax;
  std::size_t length = 40;

  static Aggregation pooled(PoolMode mode) { return {false, mode, 0}; }
  static Aggregation pad(std::size_t length) { return {true, PoolMode::kMax, length}; }

  std::string name() const;
  bool operator==(const Aggregation& o) const {
    return padded == o.padded && (padded ? length == o.length : mode == o.mode);
  }
};

// "pool-max", "pool-avg", "pool-min" or "pad-<L>".
Aggregation parse_aggregation(std::string_view text);

struct ExperimentConfig {
  std::string embedding_source = "pseudo:32";
  int labels = 3;
  Aggregation aggregation = Aggregation::pooled(PoolMode::kMax);
  HeadKind head = HeadKind::kLogReg;
  RegularizationSpec reg;
  TrainConfig train;
  CnnArch cnn;
  BiLstmArch bilstm;

  // Throws ConfigError, including for pooled/sequence-head mismatches.
  void validate() const;
  // Every field, with reals as hex floats, in a fixed order.
  std::string canonical() const;
  // 16 hex digits of FNV-1a 64 over canonical().
  std::string fingerprint() const;
};

struct RunResult {
  std::string fingerprint;
  ExperimentConfig config;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  // Largest single-class fraction of the test split.
  double majority_baseline = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double wall_time = 0.0;
};

// "pseudo:<dim>" builds a pseudo-embedded store for the whole corpus;
// anything else is read as a STEB file path.
EmbeddingStore resolve_embeddings(std::string_view source, const Corpus& corpus);
EmbeddingStore pseudo_store(const Corpus& corpus, std::size_t dim);

// Trains on the train split and scores the test split. The validation split
// is not used. Throws DataError if the store misses any needed statement.
RunResult run_experiment(const Corpus& corpus, const EmbeddingStore& store,
                         const ExperimentConfig& config);

struct SeedSummary {
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;  // sample (n - 1) standard deviation
  double mean_macro_f1 = 0.0;
  double stddev_macro_f1 = 0.0;
  std::vector<RunResult> runs;
};

SeedSummary repeat_seeds(const Corpus& corpus, const EmbeddingStore& store,
                         const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds);

struct SweepRow {
  std::size_t length = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  RunResult run;
};

// One run per padded length with the base config's seed. Lengths must be
// strictly ascending and within [kernel width (for cnn), kMaxPadLength].
std::vector<SweepRow> sweep_lengths(const Corpus& corpus, const EmbeddingStore& store,
                                    const ExperimentConfig& base,
                                    const std::vector<std::size_t>& lengths);

// Runs every config, up to `jobs` at a time. Stores are looked up by each
// config's embedding_source. The result order is sorted by fingerprint and
// does not depend on `jobs`.
std::vector<RunResult> run_grid(const Corpus& corpus,
                                const std::map<std::string, EmbeddingStore, std::less<>>& stores,
                                const std::vector<ExperimentConfig>& configs, unsigned jobs);

}  // namespace poolbench
