#include "poolbench/heads/bilstm.hpp"

#include <algorithm>
#include <cmath>

#include "poolbench/errors.hpp"
#include "poolbench/heads/training_loop.hpp"

namespace poolbench {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

BiLstmHead::BiLstmHead(std::size_t classes, std::size_t dim, BiLstmArch arch)
    : classes_(classes), dim_(dim), arch_(arch) {
  if (classes_ < 2) throw ConfigError("a classifier needs at least 2 classes");
  if (dim_ == 0) throw ConfigError("input dim must be positive");
  if (arch_.hidden == 0) throw ConfigError("LSTM hidden size must be positive");
  params_.assign(2 * direction_size() + classes_ * 2 * arch_.hidden + classes_, 0.0);
}

std::size_t BiLstmHead::direction_size() const {
  const std::size_t h = arch_.hidden;
  return 4 * h * dim_ + 4 * h * h + 4 * h;
}

void BiLstmHead::init_uniform(Rng& rng, double range) {
  for (auto& p : params_) p = rng.uniform(-range, range);
}

void BiLstmHead::check_input(const PaddedMatrix& x) const {
  if (x.dim != dim_) {
    throw ConfigError("input dim " + std::to_string(x.dim) + " does not match LSTM dim " +
                      std::to_string(dim_));
  }
  if (x.true_length == 0 || x.true_length > x.length) {
    throw ConfigError("padded matrix true_length out of range");
  }
}

void BiLstmHead::run_direction(const double* block, const PaddedMatrix& x, bool reverse,
                               Trace& tr) const {
  const std::size_t h = arch_.hidden;
  const std::size_t steps = x.true_length;
  const double* wx = block;
  const double* wh = wx + 4 * h * dim_;
  const double* bias = wh + 4 * h * h;
  tr.gates.assign(steps * 4 * h, 0.0);
  tr.cells.assign((steps + 1) * h, 0.0);
  tr.hiddens.assign((steps + 1) * h, 0.0);

  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    const double* xt = x.values.data() + t * dim_;
    const double* h_prev = tr.hiddens.data() + s * h;
    const double* c_prev = tr.cells.data() + s * h;
    double* gate = tr.gates.data() + s * 4 * h;
    for (std::size_t r = 0; r < 4 * h; ++r) {
      double z = bias[r];
      const double* wxr = wx + r * dim_;
      for (std::size_t j = 0; j < dim_; ++j) z += wxr[j] * xt[j];
      const double* whr = wh + r * h;
      for (std::size_t j = 0; j < h; ++j) z += whr[j] * h_prev[j];
      gate[r] = r < 3 * h ? sigmoid(z) : std::tanh(z);
    }
    double* c = tr.cells.data() + (s + 1) * h;
    double* hid = tr.hiddens.data() + (s + 1) * h;
    for (std::size_t u = 0; u < h; ++u) {
      const double i = gate[u], f = gate[h + u], o = gate[2 * h + u], g = gate[3 * h + u];
      c[u] = f * c_prev[u] + i * g;
      hid[u] = o * std::tanh(c[u]);
    }
  }
}

void BiLstmHead::backprop_direction(const double* block, double* grad_block,
                                    const PaddedMatrix& x, bool reverse, const Trace& tr,
                                    std::span<const double> dh_last) const {
  const std::size_t h = arch_.hidden;
  const std::size_t steps = x.true_length;
  const double* wh = block + 4 * h * dim_;
  double* g_wx = grad_block;
  double* g_wh = g_wx + 4 * h * dim_;
  double* g_b = g_wh + 4 * h * h;

  std::vector<double> dh(dh_last.begin(), dh_last.end());
  std::vector<double> dc(h, 0.0);
  std::vector<double> dpre(4 * h);
  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    const double* xt = x.values.data() + t * dim_;
    const double* gate = tr.gates.data() + s * 4 * h;
    const double* c = tr.cells.data() + (s + 1) * h;
    const double* c_prev = tr.cells.data() + s * h;
    const double* h_prev = tr.hiddens.data() + s * h;
    for (std::size_t u = 0; u < h; ++u) {
      const double i = gate[u], f = gate[h + u], o = gate[2 * h + u], g = gate[3 * h + u];
      const double tc = std::tanh(c[u]);
      const double dcu = dc[u] + dh[u] * o * (1.0 - tc * tc);
      dpre[u] = dcu * g * i * (1.0 - i);
      dpre[h + u] = dcu * c_prev[u] * f * (1.0 - f);
      dpre[2 * h + u] = dh[u] * tc * o * (1.0 - o);
      dpre[3 * h + u] = dcu * i * (1.0 - g * g);
      dc[u] = dcu * f;
    }
    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t r = 0; r < 4 * h; ++r) {
      const double d = dpre[r];
      if (d == 0.0) continue;
      g_b[r] += d;
      double* gxr = g_wx + r * dim_;
      for (std::size_t j = 0; j < dim_; ++j) gxr[j] += d * xt[j];
      double* ghr = g_wh + r * h;
      const double* whr = wh + r * h;
      for (std::size_t j = 0; j < h; ++j) {
        ghr[j] += d * h_prev[j];
        dh[j] += d * whr[j];
      }
    }
  }
}

std::vector<double> BiLstmHead::readout_logits(std::span<const double> readout) const {
  const std::size_t width = 2 * arch_.hidden;
  const double* dense_w = params_.data() + 2 * direction_size();
  const double* dense_b = dense_w + classes_ * width;
  std::vector<double> out(classes_);
  for (std::size_t c = 0; c < classes_; ++c) {
    double z = dense_b[c];
    for (std::size_t j = 0; j < width; ++j) z += dense_w[c * width + j] * readout[j];
    out[c] = z;
  }
  return out;
}

std::vector<double> BiLstmHead::logits(const PaddedMatrix& x) const {
  check_input(x);
  const std::size_t h = arch_.hidden;
  Trace fwd, bwd;
  run_direction(params_.data(), x, false, fwd);
  run_direction(params_.data() + direction_size(), x, true, bwd);
  std::vector<double> readout(2 * h);
  std::copy_n(fwd.hiddens.end() - static_cast<long>(h), h, readout.begin());
  std::copy_n(bwd.hiddens.end() - static_cast<long>(h), h, readout.begin() + static_cast<long>(h));
  return readout_logits(readout);
}

std::size_t BiLstmHead::predict(const PaddedMatrix& x) const { return argmax(logits(x)); }

double BiLstmHead::loss_and_grad(const Batch<PaddedMatrix>& batch, std::span<double> grad,
                                 Rng* dropout_rng, double dropout_keep) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t h = arch_.hidden;
  const std::size_t width = 2 * h;
  const std::size_t dir = direction_size();
  const double* dense_w = params_.data() + 2 * dir;
  double* g_dense_w = grad.data() + 2 * dir;
  double* g_dense_b = g_dense_w + classes_ * width;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  Trace fwd, bwd;
  std::vector<double> readout(width), mask(width, 1.0), dreadout(width);
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const PaddedMatrix& x = *batch.inputs[b];
    check_input(x);
    const std::size_t y = batch.labels[b];
    run_direction(params_.data(), x, false, fwd);
    run_direction(params_.data() + dir, x, true, bwd);
    std::copy_n(fwd.hiddens.end() - static_cast<long>(h), h, readout.begin());
    std::copy_n(bwd.hiddens.end() - static_cast<long>(h), h,
                readout.begin() + static_cast<long>(h));
    if (dropout_rng != nullptr && dropout_keep < 1.0) {
      for (std::size_t j = 0; j < width; ++j) {
        mask[j] = dropout_rng->uniform() < dropout_keep ? 1.0 / dropout_keep : 0.0;
        readout[j] *= mask[j];
      }
    } else {
      std::fill(mask.begin(), mask.end(), 1.0);
    }
    auto logits = readout_logits(readout);
    total += cross_entropy(logits, y);
    softmax_inplace(logits);
    logits[y] -= 1.0;

    std::fill(dreadout.begin(), dreadout.end(), 0.0);
    for (std::size_t c = 0; c < classes_; ++c) {
      const double d = logits[c] * inv_n;
      g_dense_b[c] += d;
      for (std::size_t j = 0; j < width; ++j) {
        g_dense_w[c * width + j] += d * readout[j];
        dreadout[j] += d * dense_w[c * width + j];
      }
    }
    for (std::size_t j = 0; j < width; ++j) dreadout[j] *= mask[j];

    const std::span<const double> dr(dreadout);
    backprop_direction(params_.data(), grad.data(), x, false, fwd, dr.first(h));
    backprop_direction(params_.data() + dir, grad.data() + dir, x, true, bwd, dr.subspan(h));
  }
  return total * inv_n;
}

double BiLstmHead::loss(const Batch<PaddedMatrix>& batch) const {
  std::vector<double> scratch(params_.size());
  return loss_and_grad(batch, scratch);
}

BiLstmHead train_bilstm(std::span<const PaddedMatrix> matrices,
                        std::span<const std::size_t> labels, std::size_t classes,
                        const TrainConfig& cfg, const BiLstmArch& arch) {
  cfg.validate();
  check_labels(matrices.size(), labels, classes);
  const auto& first = matrices.front();
  for (const auto& m : matrices) {
    if (m.length != first.length || m.dim != first.dim) {
      throw ConfigError("padded matrices must share length and dim");
    }
  }
  BiLstmHead head(classes, first.dim, arch);
  Rng rng(cfg.seed);
  head.init_uniform(rng);
  const auto inputs = detail::borrow_all(matrices);
  detail::run_minibatch_training<PaddedMatrix>(head, std::span<const PaddedMatrix* const>(inputs),
                                               labels, cfg, rng, [] {});
  return head;
}

}  // namespace poolbench
