#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "poolbench/errors.hpp"
#include "poolbench/sequence.hpp"

using namespace poolbench;
using poolbench::testing::random_rows;
using poolbench::testing::reference_pool;
using poolbench::testing::to_matrix;

TEST_CASE("pool on a small hand example") {
  const auto m = to_matrix({{1, 2}, {3, 0}});
  CHECK(pool(m, PoolMode::kMax).values == std::vector<double>{3, 2});
  CHECK(pool(m, PoolMode::kMin).values == std::vector<double>{1, 0});
  CHECK(pool(m, PoolMode::kAvg).values == std::vector<double>{2, 1});
  CHECK(pool(m, PoolMode::kMax).source_id == "m");
}

TEST_CASE("pool is the identity on a single row") {
  const auto m = to_matrix({{5, -1, 0}});
  for (auto mode : {PoolMode::kMax, PoolMode::kAvg, PoolMode::kMin}) {
    CHECK(pool(m, mode).values == std::vector<double>{5, -1, 0});
  }
}

TEST_CASE("pool matches the double-loop oracle on 200 random matrices") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rows = random_rows(rng, 1 + rng.below(30), 1 + rng.below(10));
    const auto m = to_matrix(rows);
    CHECK(pool(m, PoolMode::kMax).values == reference_pool(rows, 0));
    CHECK(pool(m, PoolMode::kMin).values == reference_pool(rows, 2));
    const auto avg = pool(m, PoolMode::kAvg).values;
    const auto ref = reference_pool(rows, 1);
    for (std::size_t j = 0; j < avg.size(); ++j) {
      CHECK(std::abs(avg[j] - ref[j]) <= 1e-9 * std::max(1.0, std::abs(ref[j])));
    }
  }
}

TEST_CASE("property: min <= avg <= max and permutation invariance") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto rows = random_rows(rng, 1 + rng.below(20), 1 + rng.below(8));
    const auto mx = pool(to_matrix(rows), PoolMode::kMax).values;
    const auto mn = pool(to_matrix(rows), PoolMode::kMin).values;
    const auto av = pool(to_matrix(rows), PoolMode::kAvg).values;
    for (std::size_t j = 0; j < mx.size(); ++j) {
      CHECK(mn[j] <= av[j]);
      CHECK(av[j] <= mx[j]);
    }
    rng.shuffle(std::span(rows));
    CHECK(pool(to_matrix(rows), PoolMode::kMax).values == mx);
    CHECK(pool(to_matrix(rows), PoolMode::kMin).values == mn);
    const auto av2 = pool(to_matrix(rows), PoolMode::kAvg).values;
    for (std::size_t j = 0; j < av.size(); ++j) {
      CHECK(std::abs(av2[j] - av[j]) <= 1e-9 * std::max(1.0, std::abs(av[j])));
    }
  }
}

TEST_CASE("property: pooling [r; r] equals pooling [r]") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_rows(rng, 1, 1 + rng.below(8)).front();
    const auto twice = to_matrix({r, r});
    for (auto mode : {PoolMode::kMax, PoolMode::kAvg, PoolMode::kMin}) {
      CHECK(pool(twice, mode).values == r);
    }
  }
}

TEST_CASE("pad copies, zero-fills and records true_length") {
  const auto m = to_matrix({{1, 2}, {3, 4}});
  const auto p = pad(m, 4);
  CHECK(p.length == 4);
  CHECK(p.dim == 2);
  CHECK(p.true_length == 2);
  CHECK(p.values == std::vector<double>{1, 2, 3, 4, 0, 0, 0, 0});

  const auto same = pad(m, 2);
  CHECK(same.true_length == 2);
  CHECK(same.values == m.values());
  CHECK_THROWS_AS(pad(m, 0), ConfigError);
}

TEST_CASE("pad truncates at 40 tokens") {
  Rng rng(14);
  const auto rows = random_rows(rng, 50, 3);
  const auto p = pad(to_matrix(rows), 40);
  CHECK(p.true_length == 40);
  for (std::size_t t = 0; t < 40; ++t) {
    CHECK(std::equal(rows[t].begin(), rows[t].end(), p.row(t).begin()));
  }
}

TEST_CASE("property: pad is idempotent in content") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.below(5);
    const auto rows = random_rows(rng, 1 + rng.below(20), d);
    const std::size_t L = 1 + rng.below(25);
    const auto once = pad(to_matrix(rows), L);
    std::vector<double> head(once.values.begin(),
                             once.values.begin() + static_cast<long>(once.true_length * d));
    const auto twice = pad(TokenEmbeddingMatrix("m", d, head), L);
    CHECK(twice.values == once.values);
    CHECK(twice.true_length == once.true_length);
    for (std::size_t t = once.true_length; t < L; ++t) {
      for (double v : once.row(t)) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("pooling mode names") {
  CHECK(parse_pool_mode("average") == PoolMode::kAvg);
  CHECK(pool_mode_name(PoolMode::kMin) == "min");
  CHECK_THROWS_AS(parse_pool_mode("median"), ConfigError);
}
