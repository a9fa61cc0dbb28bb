#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "poolbench/errors.hpp"
#include "poolbench/heads/common.hpp"

namespace poolbench {

template <typename Head, typename Input>
concept TrainableHead = requires(Head h, const Head ch, const Batch<Input>& b,
                                 std::span<double> g) {
  { h.parameters() } -> std::convertible_to<std::span<double>>;
  { ch.loss_and_grad(b, g) } -> std::convertible_to<double>;
};

// Largest per-parameter relative error between the analytic gradient and
// central differences (loss(p+eps) - loss(p-eps)) / 2eps, with denominator
// max(|analytic|, |numeric|, 1e-8). Dropout is never applied. The head's
// parameters are restored before returning.
template <typename Input, TrainableHead<Input> Head>
double grad_check(Head& head, const Batch<Input>& batch, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("grad_check epsilon must be positive and finite");
  }
  auto params = head.parameters();
  std::vector<double> analytic(params.size());
  std::vector<double> scratch(params.size());
  const double base = head.loss_and_grad(batch, analytic);
  if (!std::isfinite(base)) throw TrainingError("grad_check: non-finite loss");

  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + epsilon;
    const double up = head.loss_and_grad(batch, scratch);
    params[i] = saved - epsilon;
    const double down = head.loss_and_grad(batch, scratch);
    params[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw TrainingError("grad_check: non-finite loss under perturbation");
    }
    const double numeric = (up - down) / (2.0 * epsilon);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace poolbench
