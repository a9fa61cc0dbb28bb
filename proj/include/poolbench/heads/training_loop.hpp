#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "poolbench/errors.hpp"
#include "poolbench/heads/common.hpp"
#include "poolbench/rng.hpp"

namespace poolbench::detail {

// Shuffled mini-batch loop shared by every head. The shuffle order and any
// dropout masks are drawn from `rng`, so a run is a pure function of the
// initial head state, the data and the config.
template <typename Input, typename Head, typename AfterStep>
void run_minibatch_training(Head& head, std::span<const Input* const> inputs,
                            std::span<const std::size_t> labels, const TrainConfig& cfg,
                            Rng& rng, AfterStep after_step) {
  const std::size_t n = inputs.size();
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  Optimizer opt(cfg.optimizer, cfg.learning_rate, head.parameters().size());
  std::vector<double> grad(head.parameters().size());
  std::vector<std::size_t> order(n);
  std::vector<const Input*> batch_inputs;
  std::vector<std::size_t> batch_labels;
  Rng* dropout_rng = cfg.dropout_keep < 1.0 ? &rng : nullptr;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t stop = std::min(n, start + bs);
      batch_inputs.clear();
      batch_labels.clear();
      for (std::size_t k = start; k < stop; ++k) {
        batch_inputs.push_back(inputs[order[k]]);
        batch_labels.push_back(labels[order[k]]);
      }
      const Batch<Input> batch{batch_inputs, batch_labels};
      const double loss = head.loss_and_grad(batch, grad, dropout_rng, cfg.dropout_keep);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite training loss in epoch " + std::to_string(epoch + 1));
      }
      opt.step(head.parameters(), grad);
      after_step();
    }
  }
}

template <typename Input>
std::vector<const Input*> borrow_all(std::span<const Input> items) {
  std::vector<const Input*> out;
  out.reserve(items.size());
  for (const auto& x : items) out.push_back(&x);
  return out;
}

}  // namespace poolbench::detail
