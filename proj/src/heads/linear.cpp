#include "poolbench/heads/linear.hpp"

#include <algorithm>
#include <cmath>

#include "poolbench/errors.hpp"
#include "poolbench/heads/training_loop.hpp"

namespace poolbench {

std::string_view linear_loss_name(LinearLoss loss) {
  return loss == LinearLoss::kSoftmaxCe ? "softmax_ce" : "hinge_ovr";
}

LinearModel::LinearModel(std::size_t classes, std::size_t dim, LinearLoss loss,
                         RegularizationSpec reg)
    : classes_(classes), dim_(dim), loss_(loss), reg_(reg) {
  if (classes_ < 2) throw ConfigError("a classifier needs at least 2 classes");
  if (dim_ == 0) throw ConfigError("feature dim must be positive");
  reg_.validate();
  params_.assign(classes_ * dim_ + classes_, 0.0);
}

std::vector<double> LinearModel::scores(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw ConfigError("feature dim " + std::to_string(x.size()) + " does not match model dim " +
                      std::to_string(dim_));
  }
  std::vector<double> s(classes_);
  const auto w = weights();
  const auto b = bias();
  for (std::size_t c = 0; c < classes_; ++c) {
    const double* row = w.data() + c * dim_;
    double acc = b[c];
    for (std::size_t j = 0; j < dim_; ++j) acc += row[j] * x[j];
    s[c] = acc;
  }
  return s;
}

std::vector<double> LinearModel::probabilities(std::span<const double> x) const {
  auto s = scores(x);
  softmax_inplace(s);
  return s;
}

std::size_t LinearModel::predict(std::span<const double> x) const { return argmax(scores(x)); }

double LinearModel::loss_and_grad(const Batch<FeatureVector>& batch, std::span<double> grad,
                                  Rng*, double) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double* gw = grad.data();
  double* gb = grad.data() + classes_ * dim_;
  std::vector<double> dscore(classes_);
  double total = 0.0;

  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& x = batch.inputs[k]->values;
    const std::size_t y = batch.labels[k];
    auto s = scores(x);
    if (loss_ == LinearLoss::kSoftmaxCe) {
      total += cross_entropy(s, y);
      softmax_inplace(s);
      for (std::size_t c = 0; c < classes_; ++c) dscore[c] = s[c] - (c == y ? 1.0 : 0.0);
    } else {
      for (std::size_t c = 0; c < classes_; ++c) {
        const double target = c == y ? 1.0 : -1.0;
        const double margin = target * s[c];
        if (margin < 1.0) {
          total += 1.0 - margin;
          dscore[c] = -target;
        } else {
          dscore[c] = 0.0;
        }
      }
    }
    for (std::size_t c = 0; c < classes_; ++c) {
      const double g = dscore[c] * inv_n;
      if (g == 0.0) continue;
      double* row = gw + c * dim_;
      for (std::size_t j = 0; j < dim_; ++j) row[j] += g * x[j];
      gb[c] += g;
    }
  }
  double loss = total * inv_n;

  if (reg_.kind == RegKind::kL2 && reg_.lambda > 0.0) {
    const auto w = weights();
    double sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      sq += w[i] * w[i];
      gw[i] += reg_.lambda * w[i];
    }
    loss += 0.5 * reg_.lambda * sq;
  }
  return loss;
}

double LinearModel::loss(const Batch<FeatureVector>& batch) const {
  std::vector<double> scratch(params_.size());
  return loss_and_grad(batch, scratch);
}

void LinearModel::apply_l1_prox(double threshold) {
  for (auto& w : weights()) {
    const double mag = std::abs(w) - threshold;
    w = mag > 0.0 ? std::copysign(mag, w) : 0.0;
  }
}

LinearModel train_linear(std::span<const FeatureVector> features,
                         std::span<const std::size_t> labels, std::size_t classes,
                         const TrainConfig& cfg, const RegularizationSpec& reg, LinearLoss loss) {
  cfg.validate();
  check_labels(features.size(), labels, classes);
  const std::size_t dim = features.front().dim();
  for (const auto& f : features) {
    if (f.dim() != dim) {
      throw ConfigError("feature '" + f.source_id + "' has dim " + std::to_string(f.dim()) +
                        ", expected " + std::to_string(dim));
    }
  }
  LinearModel model(classes, dim, loss, reg);
  const auto inputs = detail::borrow_all(features);
  Rng rng(cfg.seed);
  const bool l1 = reg.kind == RegKind::kL1 && reg.lambda > 0.0;
  const double threshold = cfg.learning_rate * reg.lambda;
  detail::run_minibatch_training<FeatureVector>(model, std::span<const FeatureVector* const>(inputs),
                                                labels, cfg, rng, [&] {
                                                  if (l1) model.apply_l1_prox(threshold);
                                                });
  return model;
}

}  // namespace poolbench
