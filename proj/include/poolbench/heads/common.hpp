#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace poolbench {

enum class RegKind { kL1, kL2 };

struct RegularizationSpec {
  RegKind kind = RegKind::kL2;
  double lambda = 1e-4;

  void validate() const;
  bool operator==(const RegularizationSpec&) const = default;
};

std::string_view reg_kind_name(RegKind kind);
RegKind parse_reg_kind(std::string_view text);

enum class OptimizerKind { kAdam, kSgd };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view text);

struct TrainConfig {
  double learning_rate = 0.001;
  int epochs = 5;
  int batch_size = 32;
  // Probability of keeping a unit under dropout; 1.0 disables dropout.
  double dropout_keep = 0.8;
  std::uint64_t seed = 42;
  OptimizerKind optimizer = OptimizerKind::kAdam;

  // Throws ConfigError. epochs == 0 is allowed and yields the initial model.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// A mini-batch of borrowed inputs with their class indices.
template <typename Input>
struct Batch {
  std::span<const Input* const> inputs;
  std::span<const std::size_t> labels;

  std::size_t size() const { return inputs.size(); }
};

// Adam (beta1 0.9, beta2 0.999, eps 1e-8, bias-corrected) or plain SGD over a
// flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t num_params);

  void step(std::span<double> params, std::span<const double> grad);
  double learning_rate() const { return lr_; }

 private:
  OptimizerKind kind_;
  double lr_;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

// In-place numerically stable softmax.
void softmax_inplace(std::span<double> logits);

// -log softmax(logits)[label], computed with log-sum-exp.
double cross_entropy(std::span<const double> logits, std::size_t label);

std::size_t argmax(std::span<const double> values);

// Checks that every label is < classes and that inputs and labels agree in
// size and are non-empty. Throws ConfigError.
void check_labels(std::size_t num_inputs, std::span<const std::size_t> labels,
                  std::size_t classes);

}  // namespace poolbench
