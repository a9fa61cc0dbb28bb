#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "poolbench/heads/common.hpp"
#include "poolbench/rng.hpp"
#include "poolbench/sequence.hpp"

namespace poolbench {

enum class LinearLoss { kSoftmaxCe, kHingeOvr };

std::string_view linear_loss_name(LinearLoss loss);

// Multinomial logistic regression (softmax cross-entropy) or one-vs-rest
// linear SVM (hinge), scores = W x + b.
//
// Parameters are one flat vector: W row-major (classes x dim), then b.
class LinearModel {
 public:
  // Zero-initialized. Throws ConfigError if classes < 2 or dim == 0.
  LinearModel(std::size_t classes, std::size_t dim, LinearLoss loss, RegularizationSpec reg);

  std::size_t classes() const { return classes_; }
  std::size_t dim() const { return dim_; }
  LinearLoss loss_kind() const { return loss_; }
  const RegularizationSpec& reg() const { return reg_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> weights() { return {params_.data(), classes_ * dim_}; }
  std::span<const double> weights() const { return {params_.data(), classes_ * dim_}; }
  std::span<double> bias() { return {params_.data() + classes_ * dim_, classes_}; }
  std::span<const double> bias() const { return {params_.data() + classes_ * dim_, classes_}; }

  // Throws ConfigError on dim mismatch.
  std::vector<double> scores(std::span<const double> x) const;
  // Softmax of the scores; sums to one.
  std::vector<double> probabilities(std::span<const double> x) const;
  std::size_t predict(std::span<const double> x) const;

  // Mean data loss over the batch, plus 0.5*lambda*||W||^2 when reg is L2.
  // L1 is handled by apply_l1_prox and is not part of this objective.
  // `grad` must have parameters().size() entries and is overwritten. The
  // dropout arguments exist for interface parity with the neural heads and
  // are ignored.
  double loss_and_grad(const Batch<FeatureVector>& batch, std::span<double> grad,
                       Rng* dropout_rng = nullptr, double dropout_keep = 1.0) const;
  double loss(const Batch<FeatureVector>& batch) const;

  // w <- sign(w) * max(|w| - threshold, 0) on weights, not bias.
  void apply_l1_prox(double threshold);

  bool operator==(const LinearModel&) const = default;

 private:
  std::size_t classes_;
  std::size_t dim_;
  LinearLoss loss_;
  RegularizationSpec reg_;
  std::vector<double> params_;
};

// Mini-batch training from a zero initialization. L2 enters the gradient as
// lambda*w; L1 is a proximal soft-threshold of lr*lambda after every step.
LinearModel train_linear(std::span<const FeatureVector> features,
                         std::span<const std::size_t> labels, std::size_t classes,
                         const TrainConfig& cfg, const RegularizationSpec& reg, LinearLoss loss);

}  // namespace poolbench
