#include <cmath>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "poolbench/errors.hpp"
#include "poolbench/heads/bilstm.hpp"
#include "poolbench/heads/cnn.hpp"
#include "poolbench/heads/grad_check.hpp"

using namespace poolbench;
using poolbench::testing::random_padded;

namespace {

struct TinySet {
  std::vector<PaddedMatrix> xs;
  std::vector<std::size_t> ys;
  std::vector<const PaddedMatrix*> ptrs;

  Batch<PaddedMatrix> batch() const { return {ptrs, ys}; }
};

TinySet tiny_set(Rng& rng, std::size_t n, std::size_t length, std::size_t dim, std::size_t classes) {
  TinySet s;
  for (std::size_t i = 0; i < n; ++i) {
    s.xs.push_back(random_padded(rng, length, dim, 1 + rng.below(length)));
    s.ys.push_back(rng.below(classes));
  }
  for (const auto& x : s.xs) s.ptrs.push_back(&x);
  return s;
}

void perturb_padding(Rng& rng, PaddedMatrix& p) {
  for (std::size_t i = p.true_length * p.dim; i < p.values.size(); ++i) {
    p.values[i] = rng.uniform(-10.0, 10.0);
  }
}

}  // namespace

TEST_CASE("CNN gradient matches central differences") {
  Rng rng(100);
  for (int trial = 0; trial < 3; ++trial) {
    auto set = tiny_set(rng, 4, 6, 4, 3);
    CnnHead head(3, 4, {2, 3});
    head.init_uniform(rng, 0.5);
    CHECK(grad_check<PaddedMatrix>(head, set.batch(), 1e-5) < 1e-4);
  }
}

TEST_CASE("BiLSTM gradient matches central differences") {
  Rng rng(200);
  for (int trial = 0; trial < 3; ++trial) {
    auto set = tiny_set(rng, 4, 5, 3, 3);
    BiLstmHead head(3, 3, {4});
    head.init_uniform(rng, 0.5);
    CHECK(grad_check<PaddedMatrix>(head, set.batch(), 1e-5) < 1e-3);
  }
}

TEST_CASE("CNN on an all-zero input with zero conv bias outputs the dense bias") {
  Rng rng(3);
  CnnHead head(3, 4, {2, 5});
  head.init_uniform(rng, 0.5);
  for (auto& b : head.conv_bias()) b = 0.0;
  PaddedMatrix zero{"z", 6, 4, 4, std::vector<double>(24, 0.0)};
  const auto logits = head.logits(zero);
  for (std::size_t c = 0; c < 3; ++c) CHECK(logits[c] == head.dense_bias()[c]);
}

TEST_CASE("padding rows never change CNN or BiLSTM logits") {
  Rng rng(4);
  CnnHead cnn(3, 4, {3, 6});
  cnn.init_uniform(rng, 0.5);
  BiLstmHead lstm(3, 4, {5});
  lstm.init_uniform(rng, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_padded(rng, 8, 4, 1 + rng.below(8));
    const auto cnn_before = cnn.logits(p);
    const auto lstm_before = lstm.logits(p);
    perturb_padding(rng, p);
    CHECK(cnn.logits(p) == cnn_before);
    CHECK(lstm.logits(p) == lstm_before);
  }
}

TEST_CASE("BiLSTM with true_length 1 reads the same single timestep both ways") {
  Rng rng(5);
  BiLstmHead head(2, 3, {4});
  head.init_uniform(rng, 0.5);
  // Give both directions identical parameters: the readout halves must agree.
  auto params = head.parameters();
  const std::size_t dir = (params.size() - (2 * 2 * 4 + 2)) / 2;
  std::copy_n(params.begin(), dir, params.begin() + static_cast<long>(dir));
  const auto p = random_padded(rng, 5, 3, 1);
  // Dense rows [a, a] vs [a, -a] distinguish the halves: equal halves give
  // equal class-0 contributions and cancelling class-1 contributions.
  auto dense = params.subspan(2 * dir, 2 * 8);
  for (std::size_t j = 0; j < 4; ++j) {
    dense[j] = dense[4 + j] = 1.0;
    dense[8 + j] = 1.0;
    dense[12 + j] = -1.0;
  }
  params[params.size() - 2] = 0.0;
  params[params.size() - 1] = 0.0;
  const auto logits = head.logits(p);
  CHECK(std::abs(logits[1]) < 1e-15);
  CHECK(logits[0] != 0.0);
}

TEST_CASE("CNN and BiLSTM memorize a single example") {
  Rng rng(6);
  const std::vector<PaddedMatrix> xs = {random_padded(rng, 10, 8, 7)};
  const std::vector<std::size_t> ys = {2};
  std::vector<const PaddedMatrix*> ptrs = {&xs[0]};
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.01;
  cfg.dropout_keep = 1.0;
  const auto cnn = train_cnn(xs, ys, 3, cfg, {3, 16});
  CHECK(cnn.loss({ptrs, ys}) < 0.01);
  const auto lstm = train_bilstm(xs, ys, 3, cfg, {8});
  CHECK(lstm.loss({ptrs, ys}) < 0.01);
}

TEST_CASE("neural training is deterministic under a fixed seed, dropout included") {
  Rng rng(7);
  auto set = tiny_set(rng, 20, 6, 4, 3);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.dropout_keep = 0.8;
  CHECK(train_cnn(set.xs, set.ys, 3, cfg, {2, 4}) == train_cnn(set.xs, set.ys, 3, cfg, {2, 4}));
  CHECK(train_bilstm(set.xs, set.ys, 3, cfg, {3}) == train_bilstm(set.xs, set.ys, 3, cfg, {3}));
  cfg.seed = 7;
  const auto other = train_cnn(set.xs, set.ys, 3, cfg, {2, 4});
  cfg.seed = 42;
  CHECK_FALSE(other == train_cnn(set.xs, set.ys, 3, cfg, {2, 4}));
}

TEST_CASE("neural heads initialize within +-0.08") {
  Rng rng(8);
  auto set = tiny_set(rng, 3, 4, 2, 2);
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto cnn = train_cnn(set.xs, set.ys, 2, cfg, {2, 3});
  for (double p : cnn.parameters()) CHECK(std::abs(p) <= 0.08);
  const auto lstm = train_bilstm(set.xs, set.ys, 2, cfg, {3});
  for (double p : lstm.parameters()) CHECK(std::abs(p) <= 0.08);
}

TEST_CASE("neural head input validation") {
  Rng rng(9);
  auto set = tiny_set(rng, 3, 4, 2, 2);
  const TrainConfig cfg;
  CHECK_THROWS_AS(train_cnn(set.xs, set.ys, 2, cfg, {5, 3}), ConfigError);
  CHECK_THROWS_AS(train_cnn({}, {}, 2, cfg, {2, 3}), ConfigError);
  CHECK_THROWS_AS(train_bilstm({}, {}, 2, cfg, {3}), ConfigError);
  set.xs[1] = random_padded(rng, 5, 2, 2);
  CHECK_THROWS_AS(train_bilstm(set.xs, set.ys, 2, cfg, {3}), ConfigError);
}
