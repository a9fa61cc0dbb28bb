#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poolbench/embedding.hpp"

namespace poolbench {

enum class PoolMode { kMax, kAvg, kMin };

std::string_view pool_mode_name(PoolMode mode);
// Accepts "max", "avg"/"average"/"mean", "min". Throws ConfigError otherwise.
PoolMode parse_pool_mode(std::string_view text);

struct FeatureVector {
  std::string source_id;
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
};

// L x d matrix; rows at index >= true_length are zero.
struct PaddedMatrix {
  std::string source_id;
  std::size_t length = 0;
  std::size_t dim = 0;
  std::size_t true_length = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t t) const { return {values.data() + t * dim, dim}; }
  std::span<double> row(std::size_t t) { return {values.data() + t * dim, dim}; }
};

// Element-wise max/mean/min across tokens. The mean divides by the token count.
FeatureVector pool(const TokenEmbeddingMatrix& m, PoolMode mode);

// Keeps the first min(T, length) rows and zero-fills the tail.
PaddedMatrix pad(const TokenEmbeddingMatrix& m, std::size_t length);

}  // namespace poolbench
