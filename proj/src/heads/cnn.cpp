#include "poolbench/heads/cnn.hpp"

#include <algorithm>

#include "poolbench/errors.hpp"
#include "poolbench/heads/training_loop.hpp"

namespace poolbench {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

CnnHead::CnnHead(std::size_t classes, std::size_t dim, CnnArch arch)
    : classes_(classes), dim_(dim), arch_(arch) {
  if (classes_ < 2) throw ConfigError("a classifier needs at least 2 classes");
  if (dim_ == 0) throw ConfigError("input dim must be positive");
  if (arch_.kernel_width == 0 || arch_.filters == 0) {
    throw ConfigError("CNN kernel width and filter count must be positive");
  }
  const std::size_t f = arch_.filters;
  params_.assign(f * arch_.kernel_width * dim_ + f + classes_ * f + classes_, 0.0);
}

void CnnHead::init_uniform(Rng& rng, double range) {
  for (auto& p : params_) p = rng.uniform(-range, range);
}

std::span<double> CnnHead::conv_weights() {
  return {params_.data(), arch_.filters * arch_.kernel_width * dim_};
}
std::span<double> CnnHead::conv_bias() {
  return {params_.data() + arch_.filters * arch_.kernel_width * dim_, arch_.filters};
}
std::span<double> CnnHead::dense_weights() {
  return {conv_bias().data() + arch_.filters, classes_ * arch_.filters};
}
std::span<double> CnnHead::dense_bias() {
  return {dense_weights().data() + classes_ * arch_.filters, classes_};
}

void CnnHead::check_input(const PaddedMatrix& x) const {
  if (x.dim != dim_) {
    throw ConfigError("input dim " + std::to_string(x.dim) + " does not match CNN dim " +
                      std::to_string(dim_));
  }
  if (arch_.kernel_width > x.length) {
    throw ConfigError("kernel width " + std::to_string(arch_.kernel_width) +
                      " exceeds padded length " + std::to_string(x.length));
  }
  if (x.true_length == 0 || x.true_length > x.length) {
    throw ConfigError("padded matrix true_length out of range");
  }
}

void CnnHead::forward(const PaddedMatrix& x, Forward& f, Rng* dropout_rng, double keep) const {
  const std::size_t nf = arch_.filters;
  const std::size_t kd = arch_.kernel_width * dim_;
  const double* conv_w = params_.data();
  const double* conv_b = conv_w + nf * kd;
  const double* dense_w = conv_b + nf;
  const double* dense_b = dense_w + classes_ * nf;
  const std::size_t positions = std::min(x.true_length, x.length - arch_.kernel_width + 1);
  // Values past the last real token are excluded from each window.
  const std::size_t real_values = x.true_length * dim_;

  f.pooled.assign(nf, 0.0);
  f.mask.assign(nf, 1.0);
  f.argmax_pos.assign(nf, 0);
  f.active.assign(nf, false);
  for (std::size_t k = 0; k < nf; ++k) {
    const double* w = conv_w + k * kd;
    double best = 0.0;
    std::size_t best_pos = 0;
    bool any_positive = false;
    for (std::size_t p = 0; p < positions; ++p) {
      const std::size_t start = p * dim_;
      const std::size_t n = std::min(kd, real_values - start);
      const double z = conv_b[k] + dot(w, x.values.data() + start, n);
      if (z > best) {
        best = z;
        best_pos = p;
        any_positive = true;
      }
    }
    f.pooled[k] = best;
    f.argmax_pos[k] = best_pos;
    f.active[k] = any_positive;
  }
  if (dropout_rng != nullptr && keep < 1.0) {
    for (std::size_t k = 0; k < nf; ++k) {
      f.mask[k] = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
      f.pooled[k] *= f.mask[k];
    }
  }
  f.logits.assign(classes_, 0.0);
  for (std::size_t c = 0; c < classes_; ++c) {
    f.logits[c] = dense_b[c] + dot(dense_w + c * nf, f.pooled.data(), nf);
  }
}

std::vector<double> CnnHead::logits(const PaddedMatrix& x) const {
  check_input(x);
  Forward f;
  forward(x, f, nullptr, 1.0);
  return f.logits;
}

std::size_t CnnHead::predict(const PaddedMatrix& x) const { return argmax(logits(x)); }

double CnnHead::loss_and_grad(const Batch<PaddedMatrix>& batch, std::span<double> grad,
                              Rng* dropout_rng, double dropout_keep) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t nf = arch_.filters;
  const std::size_t kd = arch_.kernel_width * dim_;
  const double* dense_w = params_.data() + nf * kd + nf;
  double* g_conv_w = grad.data();
  double* g_conv_b = g_conv_w + nf * kd;
  double* g_dense_w = g_conv_b + nf;
  double* g_dense_b = g_dense_w + classes_ * nf;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  Forward f;
  std::vector<double> dlogits(classes_);
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const PaddedMatrix& x = *batch.inputs[b];
    check_input(x);
    const std::size_t y = batch.labels[b];
    forward(x, f, dropout_rng, dropout_keep);
    total += cross_entropy(f.logits, y);

    dlogits = f.logits;
    softmax_inplace(dlogits);
    dlogits[y] -= 1.0;
    for (auto& v : dlogits) v *= inv_n;

    for (std::size_t c = 0; c < classes_; ++c) {
      g_dense_b[c] += dlogits[c];
      double* row = g_dense_w + c * nf;
      for (std::size_t k = 0; k < nf; ++k) row[k] += dlogits[c] * f.pooled[k];
    }
    const std::size_t real_values = x.true_length * dim_;
    for (std::size_t k = 0; k < nf; ++k) {
      if (!f.active[k] || f.mask[k] == 0.0) continue;
      double dz = 0.0;
      for (std::size_t c = 0; c < classes_; ++c) dz += dense_w[c * nf + k] * dlogits[c];
      dz *= f.mask[k];
      g_conv_b[k] += dz;
      const std::size_t start = f.argmax_pos[k] * dim_;
      const std::size_t n = std::min(kd, real_values - start);
      double* gw = g_conv_w + k * kd;
      const double* xv = x.values.data() + start;
      for (std::size_t i = 0; i < n; ++i) gw[i] += dz * xv[i];
    }
  }
  return total * inv_n;
}

double CnnHead::loss(const Batch<PaddedMatrix>& batch) const {
  std::vector<double> scratch(params_.size());
  return loss_and_grad(batch, scratch);
}

CnnHead train_cnn(std::span<const PaddedMatrix> matrices, std::span<const std::size_t> labels,
                  std::size_t classes, const TrainConfig& cfg, const CnnArch& arch) {
  cfg.validate();
  check_labels(matrices.size(), labels, classes);
  const auto& first = matrices.front();
  for (const auto& m : matrices) {
    if (m.length != first.length || m.dim != first.dim) {
      throw ConfigError("padded matrices must share length and dim");
    }
  }
  if (arch.kernel_width > first.length) {
    throw ConfigError("kernel width " + std::to_string(arch.kernel_width) +
                      " exceeds padded length " + std::to_string(first.length));
  }
  CnnHead head(classes, first.dim, arch);
  Rng rng(cfg.seed);
  head.init_uniform(rng);
  const auto inputs = detail::borrow_all(matrices);
  detail::run_minibatch_training<PaddedMatrix>(head, std::span<const PaddedMatrix* const>(inputs),
                                               labels, cfg, rng, [] {});
  return head;
}

}  // namespace poolbench
