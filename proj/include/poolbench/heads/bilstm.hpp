#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "poolbench/heads/common.hpp"
#include "poolbench/rng.hpp"
#include "poolbench/sequence.hpp"

namespace poolbench {

struct BiLstmArch {
  std::size_t hidden = 64;

  bool operator==(const BiLstmArch&) const = default;
};

// Bidirectional LSTM over the real timesteps of a padded matrix. The forward
// direction reads 0..T-1, the backward one T-1..0 (T = true_length); the
// readout is [h_fwd(T-1); h_bwd(0)] -> dropout -> dense. Padded rows never
// enter either recurrence.
//
// Flat parameter layout, per direction (forward first): input weights
// (4H x dim), recurrent weights (4H x H), bias (4H), gate order i, f, o, g.
// Then dense weights (classes x 2H) and dense bias (classes).
class BiLstmHead {
 public:
  BiLstmHead(std::size_t classes, std::size_t dim, BiLstmArch arch);

  void init_uniform(Rng& rng, double range = 0.08);

  std::size_t classes() const { return classes_; }
  std::size_t dim() const { return dim_; }
  const BiLstmArch& arch() const { return arch_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  std::vector<double> logits(const PaddedMatrix& x) const;
  std::size_t predict(const PaddedMatrix& x) const;

  double loss_and_grad(const Batch<PaddedMatrix>& batch, std::span<double> grad,
                       Rng* dropout_rng = nullptr, double dropout_keep = 1.0) const;
  double loss(const Batch<PaddedMatrix>& batch) const;

  bool operator==(const BiLstmHead&) const = default;

 private:
  // Activations of one direction, stored per step for backpropagation.
  struct Trace {
    std::vector<double> gates;  // steps x 4H, post-nonlinearity
    std::vector<double> cells;  // (steps + 1) x H, row 0 is the zero state
    std::vector<double> hiddens;  // (steps + 1) x H
  };
  std::size_t direction_size() const;
  void check_input(const PaddedMatrix& x) const;
  void run_direction(const double* block, const PaddedMatrix& x, bool reverse, Trace& tr) const;
  void backprop_direction(const double* block, double* grad_block, const PaddedMatrix& x,
                          bool reverse, const Trace& tr, std::span<const double> dh_last) const;
  std::vector<double> readout_logits(std::span<const double> readout) const;

  std::size_t classes_;
  std::size_t dim_;
  BiLstmArch arch_;
  std::vector<double> params_;
};

BiLstmHead train_bilstm(std::span<const PaddedMatrix> matrices,
                        std::span<const std::size_t> labels, std::size_t classes,
                        const TrainConfig& cfg, const BiLstmArch& arch);

}  // namespace poolbench
