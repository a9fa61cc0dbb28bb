#include "poolbench/sequence.hpp"

#include <algorithm>

#include "poolbench/errors.hpp"

namespace poolbench {

std::string_view pool_mode_name(PoolMode mode) {
  switch (mode) {
    case PoolMode::kMax: return "max";
    case PoolMode::kAvg: return "avg";
    case PoolMode::kMin: return "min";
  }
  return "?";
}

PoolMode parse_pool_mode(std::string_view text) {
  if (text == "max") return PoolMode::kMax;
  if (text == "avg" || text == "average" || text == "mean") return PoolMode::kAvg;
  if (text == "min") return PoolMode::kMin;
  throw ConfigError("unknown pooling mode '" + std::string(text) + "' (expected max, avg or min)");
}

FeatureVector pool(const TokenEmbeddingMatrix& m, PoolMode mode) {
  const std::size_t d = m.dim();
  const std::size_t n = m.tokens();
  FeatureVector out{m.statement_id(), std::vector<double>(m.row(0).begin(), m.row(0).end())};
  auto& acc = out.values;
  for (std::size_t t = 1; t < n; ++t) {
    const auto r = m.row(t);
    switch (mode) {
      case PoolMode::kMax:
        for (std::size_t j = 0; j < d; ++j) acc[j] = std::max(acc[j], r[j]);
        break;
      case PoolMode::kMin:
        for (std::size_t j = 0; j < d; ++j) acc[j] = std::min(acc[j], r[j]);
        break;
      case PoolMode::kAvg:
        for (std::size_t j = 0; j < d; ++j) acc[j] += r[j];
        break;
    }
  }
  if (mode == PoolMode::kAvg) {
    const double inv = static_cast<double>(n);
    for (auto& v : acc) v /= inv;
  }
  return out;
}

PaddedMatrix pad(const TokenEmbeddingMatrix& m, std::size_t length) {
  if (length == 0) throw ConfigError("padded length must be positive");
  PaddedMatrix out;
  out.source_id = m.statement_id();
  out.length = length;
  out.dim = m.dim();
  out.true_length = std::min(m.tokens(), length);
  out.values.assign(length * m.dim(), 0.0);
  std::copy_n(m.values().begin(), out.true_length * m.dim(), out.values.begin());
  return out;
}

}  // namespace poolbench
