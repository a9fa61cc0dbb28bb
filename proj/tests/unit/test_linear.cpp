#include <cmath>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "poolbench/errors.hpp"
#include "poolbench/heads/grad_check.hpp"
#include "poolbench/heads/linear.hpp"

using namespace poolbench;
using poolbench::testing::make_blobs;
using poolbench::testing::nearest_centroid_accuracy;

namespace {

double test_accuracy(const LinearModel& m, const testing::Blobs& b) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < b.test_x.size(); ++i) {
    hits += m.predict(b.test_x[i].values) == b.test_y[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(b.test_x.size());
}

std::vector<FeatureVector> random_features(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector f{"f" + std::to_string(i), std::vector<double>(d)};
    for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

TEST_CASE("zero epochs yields the zero model with uniform probabilities") {
  Rng rng(1);
  const auto xs = random_features(rng, 10, 4);
  const std::vector<std::size_t> ys = {0, 1, 2, 0, 1, 2, 0, 1, 2, 0};
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto m = train_linear(xs, ys, 3, cfg, {}, LinearLoss::kSoftmaxCe);
  for (double p : m.parameters()) CHECK(p == 0.0);
  for (double p : m.probabilities(xs[0].values)) CHECK(p == doctest::Approx(1.0 / 3.0));
  for (double s : m.scores(xs[3].values)) CHECK(s == 0.0);
}

TEST_CASE("scores of an identity-row model select a coordinate") {
  LinearModel m(3, 3, LinearLoss::kSoftmaxCe, {});
  for (std::size_t c = 0; c < 3; ++c) m.weights()[c * 3 + c] = 1.0;
  const std::vector<double> x = {0.0, 7.5, 0.0};
  const auto s = m.scores(x);
  CHECK(s[1] == 7.5);
  CHECK(s[0] == 0.0);
  CHECK(m.predict(x) == 1);
  CHECK_THROWS_AS(m.scores(std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("property: softmax sums to one and argmax ignores a uniform bias shift") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t c = 2 + rng.below(5), d = 1 + rng.below(10);
    LinearModel m(c, d, LinearLoss::kSoftmaxCe, {});
    for (auto& p : m.parameters()) p = rng.uniform(-20.0, 20.0);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.uniform(-3.0, 3.0);
    const auto probs = m.probabilities(x);
    double sum = 0.0;
    for (double p : probs) {
      CHECK(p > 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    const auto before = m.predict(x);
    const double shift = rng.uniform(-50.0, 50.0);
    for (auto& b : m.bias()) b += shift;
    CHECK(m.predict(x) == before);
  }
}

TEST_CASE("blob data is separable by a nearest-centroid oracle") {
  const auto b = make_blobs(42, 16, 300, 150, 6.0);
  CHECK(nearest_centroid_accuracy(b) >= 0.97);
}

TEST_CASE("logreg and svm reach 0.95 on 3-class blobs with default training") {
  const auto b = make_blobs(42, 16, 300, 150, 6.0);
  const TrainConfig cfg;  // lr 0.001, 5 epochs, batch 32, Adam, seed 42
  const RegularizationSpec reg{RegKind::kL2, 1e-4};
  const auto lr = train_linear(b.train_x, b.train_y, 3, cfg, reg, LinearLoss::kSoftmaxCe);
  CHECK(test_accuracy(lr, b) >= 0.95);
  const auto svm = train_linear(b.train_x, b.train_y, 3, cfg, reg, LinearLoss::kHingeOvr);
  CHECK(test_accuracy(svm, b) >= 0.95);
}

TEST_CASE("training is bitwise reproducible for a fixed seed") {
  const auto b = make_blobs(3, 8, 120, 30, 4.0);
  TrainConfig cfg;
  for (auto loss : {LinearLoss::kSoftmaxCe, LinearLoss::kHingeOvr}) {
    for (auto kind : {RegKind::kL1, RegKind::kL2}) {
      const auto m1 = train_linear(b.train_x, b.train_y, 3, cfg, {kind, 1e-3}, loss);
      const auto m2 = train_linear(b.train_x, b.train_y, 3, cfg, {kind, 1e-3}, loss);
      CHECK(m1 == m2);
    }
  }
  cfg.seed = 43;
  const auto other = train_linear(b.train_x, b.train_y, 3, cfg, {}, LinearLoss::kSoftmaxCe);
  cfg.seed = 42;
  CHECK_FALSE(other == train_linear(b.train_x, b.train_y, 3, cfg, {}, LinearLoss::kSoftmaxCe));
}

TEST_CASE("L1 proximal step clamps small weights to exactly zero") {
  LinearModel m(2, 3, LinearLoss::kSoftmaxCe, {RegKind::kL1, 1.0});
  auto w = m.weights();
  const double init[] = {0.05, -0.04, 0.5, -0.5, 0.1, -0.0999};
  std::copy(std::begin(init), std::end(init), w.begin());
  m.bias()[0] = 0.01;
  m.apply_l1_prox(0.1);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 0.0);
  CHECK(w[2] == doctest::Approx(0.4));
  CHECK(w[3] == doctest::Approx(-0.4));
  CHECK(w[4] == 0.0);
  CHECK(w[5] == 0.0);
  CHECK(m.bias()[0] == 0.01);
}

TEST_CASE("L1 with a huge lambda zeroes every weight within one epoch") {
  Rng rng(9);
  const auto xs = random_features(rng, 64, 5);
  std::vector<std::size_t> ys;
  for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(i % 3);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto loss : {LinearLoss::kSoftmaxCe, LinearLoss::kHingeOvr}) {
    const auto m = train_linear(xs, ys, 3, cfg, {RegKind::kL1, 1e4}, loss);
    for (double v : m.weights()) CHECK(v == 0.0);
  }
}

TEST_CASE("hinge one-vs-rest separates a 1-D line perfectly") {
  std::vector<FeatureVector> xs;
  std::vector<std::size_t> ys;
  for (int i = 1; i <= 20; ++i) {
    xs.push_back({"n", {-0.5 - 0.1 * i}});
    ys.push_back(0);
    xs.push_back({"p", {0.5 + 0.1 * i}});
    ys.push_back(1);
  }
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.epochs = 300;
  cfg.batch_size = 8;
  const auto m = train_linear(xs, ys, 2, cfg, {RegKind::kL2, 0.0}, LinearLoss::kHingeOvr);
  std::vector<const FeatureVector*> ptrs;
  for (const auto& x : xs) ptrs.push_back(&x);
  CHECK(m.loss({ptrs, ys}) == 0.0);
  for (double v : {-3.0, -0.7, 0.7, 3.0}) {
    CHECK(m.predict(std::vector<double>{v}) == (v < 0 ? 0u : 1u));
  }
}

TEST_CASE("softmax head gradient matches central differences") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t c = 3, d = 6;
    const auto xs = random_features(rng, 12, d);
    std::vector<std::size_t> ys;
    for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(rng.below(c));
    std::vector<const FeatureVector*> ptrs;
    for (const auto& x : xs) ptrs.push_back(&x);
    LinearModel m(c, d, LinearLoss::kSoftmaxCe, {RegKind::kL2, 0.01});
    for (auto& p : m.parameters()) p = rng.uniform(-1.0, 1.0);
    const double err = grad_check<FeatureVector>(m, Batch<FeatureVector>{ptrs, ys}, 1e-5);
    CHECK(err < 1e-6);
  }
}

TEST_CASE("grad_check rejects a zero epsilon") {
  LinearModel m(2, 1, LinearLoss::kSoftmaxCe, {});
  const FeatureVector x{"x", {1.0}};
  const FeatureVector* ptr = &x;
  const std::size_t y = 0;
  CHECK_THROWS_AS(grad_check<FeatureVector>(m, Batch<FeatureVector>{{&ptr, 1}, {&y, 1}}, 0.0),
                  ConfigError);
}

TEST_CASE("train_linear input validation") {
  Rng rng(4);
  auto xs = random_features(rng, 4, 3);
  const std::vector<std::size_t> ys = {0, 1, 0, 1};
  const TrainConfig cfg;
  CHECK_THROWS_AS(train_linear({}, {}, 2, cfg, {}, LinearLoss::kSoftmaxCe), ConfigError);
  CHECK_THROWS_AS(train_linear(xs, std::vector<std::size_t>{0, 1, 0, 2}, 2, cfg, {},
                               LinearLoss::kSoftmaxCe),
                  ConfigError);
  CHECK_THROWS_AS(train_linear(xs, std::vector<std::size_t>{0, 1}, 2, cfg, {},
                               LinearLoss::kSoftmaxCe),
                  ConfigError);
  xs[2].values.push_back(0.0);
  CHECK_THROWS_AS(train_linear(xs, ys, 2, cfg, {}, LinearLoss::kSoftmaxCe), ConfigError);
  CHECK_THROWS_AS(LinearModel(1, 3, LinearLoss::kSoftmaxCe, {}), ConfigError);
  CHECK_THROWS_AS(LinearModel(2, 3, LinearLoss::kSoftmaxCe, {RegKind::kL2, -1.0}), ConfigError);
}
