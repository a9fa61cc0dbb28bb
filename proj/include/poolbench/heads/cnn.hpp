#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "poolbench/heads/common.hpp"
#include "poolbench/rng.hpp"
#include "poolbench/sequence.hpp"

namespace poolbench {

struct CnnArch {
  std::size_t kernel_width = 3;
  std::size_t filters = 100;

  bool operator==(const CnnArch&) const = default;
};

// 1-D convolution over time -> ReLU -> max-over-time -> dropout -> dense.
//
// Rows at or beyond a matrix's true_length are read as zero, and only window
// positions that start on a real token take part in the max, so the content of
// padding rows never reaches the logits.
//
// Flat parameter layout: conv weights (filters x kernel_width x dim), conv
// bias (filters), dense weights (classes x filters), dense bias (classes).
class CnnHead {
 public:
  // Zero parameters; see init_uniform.
  CnnHead(std::size_t classes, std::size_t dim, CnnArch arch);

  void init_uniform(Rng& rng, double range = 0.08);

  std::size_t classes() const { return classes_; }
  std::size_t dim() const { return dim_; }
  const CnnArch& arch() const { return arch_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> conv_weights();
  std::span<double> conv_bias();
  std::span<double> dense_weights();
  std::span<double> dense_bias();

  // Inference logits (no dropout). Throws ConfigError on shape mismatch.
  std::vector<double> logits(const PaddedMatrix& x) const;
  std::size_t predict(const PaddedMatrix& x) const;

  // Mean softmax cross-entropy over the batch; `grad` is overwritten. Dropout
  // on the pooled features is applied iff dropout_rng is non-null and
  // dropout_keep < 1 (inverted scaling by 1/keep).
  double loss_and_grad(const Batch<PaddedMatrix>& batch, std::span<double> grad,
                       Rng* dropout_rng = nullptr, double dropout_keep = 1.0) const;
  double loss(const Batch<PaddedMatrix>& batch) const;

  bool operator==(const CnnHead&) const = default;

 private:
  struct Forward {
    std::vector<double> pooled;             // per filter, after dropout
    std::vector<double> mask;               // dropout multiplier per filter
    std::vector<std::size_t> argmax_pos;    // per filter
    std::vector<bool> active;               // pre-activation > 0 at argmax
    std::vector<double> logits;
  };
  void check_input(const PaddedMatrix& x) const;
  void forward(const PaddedMatrix& x, Forward& f, Rng* dropout_rng, double keep) const;

  std::size_t classes_;
  std::size_t dim_;
  CnnArch arch_;
  std::vector<double> params_;
};

// Seeded uniform(-0.08, 0.08) initialization, then mini-batch training.
// Throws ConfigError for an empty set, inconsistent shapes or a kernel wider
// than the padded length.
CnnHead train_cnn(std::span<const PaddedMatrix> matrices, std::span<const std::size_t> labels,
                  std::size_t classes, const TrainConfig& cfg, const CnnArch& arch);

}  // namespace poolbench
