#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace poolbench {

// Fraction of exact matches. Throws ConfigError on empty or mismatched input.
double accuracy(std::span<const std::size_t> pred, std::span<const std::size_t> gold);

// confusion[gold][pred]
std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const std::size_t> pred,
                                                       std::span<const std::size_t> gold,
                                                       std::size_t classes);

struct ClassScores {
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
};

// Per-class precision/recall/F1. A zero denominator yields 0, so a class that
// is absent from both pred and gold scores F1 = 0.
ClassScores class_scores(std::span<const std::size_t> pred, std::span<const std::size_t> gold,
                         std::size_t classes);

// Unweighted mean of per-class F1 over all `classes` classes.
double macro_f1(std::span<const std::size_t> pred, std::span<const std::size_t> gold,
                std::size_t classes);

}  // namespace poolbench
