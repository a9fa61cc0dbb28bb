#include "poolbench/heads/common.hpp"

#include <algorithm>
#include <cmath>

#include "poolbench/errors.hpp"

namespace poolbench {

void RegularizationSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("regularization lambda must be a finite non-negative number");
  }
}

std::string_view reg_kind_name(RegKind kind) { return kind == RegKind::kL1 ? "l1" : "l2"; }

RegKind parse_reg_kind(std::string_view text) {
  if (text == "l1" || text == "L1") return RegKind::kL1;
  if (text == "l2" || text == "L2") return RegKind::kL2;
  throw ConfigError("unknown regularization '" + std::string(text) + "' (expected l1 or l2)");
}

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "adam") return OptimizerKind::kAdam;
  if (text == "sgd") return OptimizerKind::kSgd;
  throw ConfigError("unknown optimizer '" + std::string(text) + "' (expected adam or sgd)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  if (!(dropout_keep > 0.0 && dropout_keep <= 1.0)) {
    throw ConfigError("dropout keep probability must lie in (0, 1]");
  }
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t num_params)
    : kind_(kind), lr_(learning_rate) {
  if (kind_ == OptimizerKind::kAdam) {
    m_.assign(num_params, 0.0);
    v_.assign(num_params, 0.0);
  }
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (kind_ == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
    return;
  }
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + kEps);
  }
}

void softmax_inplace(std::span<double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (auto& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : logits) v /= sum;
}

double cross_entropy(std::span<const double> logits, std::size_t label) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  return std::log(sum) + mx - logits[label];
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) -
                                  values.begin());
}

void check_labels(std::size_t num_inputs, std::span<const std::size_t> labels,
                  std::size_t classes) {
  if (num_inputs == 0) throw ConfigError("training set is empty");
  if (labels.size() != num_inputs) {
    throw ConfigError("got " + std::to_string(num_inputs) + " inputs but " +
                      std::to_string(labels.size()) + " labels");
  }
  for (auto y : labels) {
    if (y >= classes) {
      throw ConfigError("class index " + std::to_string(y) + " out of range for " +
                        std::to_string(classes) + " classes");
    }
  }
}

}  // namespace poolbench
