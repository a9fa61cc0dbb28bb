#include "poolbench/metrics.hpp"

#include <string>

#include "poolbench/errors.hpp"

namespace poolbench {

namespace {

void check_pair(std::span<const std::size_t> pred, std::span<const std::size_t> gold) {
  if (pred.size() != gold.size()) {
    throw ConfigError("prediction/gold length mismatch: " + std::to_string(pred.size()) +
                      " vs " + std::to_string(gold.size()));
  }
  if (pred.empty()) throw ConfigError("cannot score an empty prediction list");
}

}  // namespace

double accuracy(std::span<const std::size_t> pred, std::span<const std::size_t> gold) {
  check_pair(pred, gold);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == gold[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const std::size_t> pred,
                                                       std::span<const std::size_t> gold,
                                                       std::size_t classes) {
  check_pair(pred, gold);
  std::vector<std::vector<std::size_t>> cm(classes, std::vector<std::size_t>(classes, 0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] >= classes || gold[i] >= classes) {
      throw ConfigError("class index out of range for " + std::to_string(classes) + " classes");
    }
    ++cm[gold[i]][pred[i]];
  }
  return cm;
}

ClassScores class_scores(std::span<const std::size_t> pred, std::span<const std::size_t> gold,
                         std::size_t classes) {
  const auto cm = confusion_matrix(pred, gold, classes);
  ClassScores s;
  s.precision.assign(classes, 0.0);
  s.recall.assign(classes, 0.0);
  s.f1.assign(classes, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t k = 0; k < classes; ++k) {
      predicted += cm[k][c];
      actual += cm[c][k];
    }
    const double tp = static_cast<double>(cm[c][c]);
    if (predicted > 0) s.precision[c] = tp / static_cast<double>(predicted);
    if (actual > 0) s.recall[c] = tp / static_cast<double>(actual);
    const double denom = s.precision[c] + s.recall[c];
    if (denom > 0.0) s.f1[c] = 2.0 * s.precision[c] * s.recall[c] / denom;
  }
  return s;
}

double macro_f1(std::span<const std::size_t> pred, std::span<const std::size_t> gold,
                std::size_t classes) {
  if (classes == 0) throw ConfigError("macro_f1 needs at least one class");
  const auto s = class_scores(pred, gold, classes);
  double sum = 0.0;
  for (double f : s.f1) sum += f;
  return sum / static_cast<double>(classes);
}

}  // namespace poolbench
