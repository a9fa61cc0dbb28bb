#include <sstream>

#include "doctest.h"
#include "poolbench/errors.hpp"
#include "poolbench/heads/model_io.hpp"

using namespace poolbench;

namespace {

template <typename M>
void randomize(M& m, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& p : m.parameters()) p = rng.uniform(-3.0, 3.0);
}

AnyModel round_trip(const AnyModel& m) {
  std::stringstream buf;
  save_model(m, buf);
  return load_model(buf);
}

}  // namespace

TEST_CASE("every head kind survives save/load exactly") {
  LinearModel lr(3, 5, LinearLoss::kSoftmaxCe, {RegKind::kL1, 0.25});
  randomize(lr, 1);
  LinearModel svm(6, 2, LinearLoss::kHingeOvr, {RegKind::kL2, 1e-4});
  randomize(svm, 2);
  CnnHead cnn(3, 4, {2, 5});
  randomize(cnn, 3);
  BiLstmHead lstm(3, 4, {3});
  randomize(lstm, 4);
  for (const AnyModel& m : {AnyModel(lr), AnyModel(svm), AnyModel(cnn), AnyModel(lstm)}) {
    CHECK(round_trip(m) == m);
  }
}

TEST_CASE("model blob starts with the version byte and kind tag") {
  std::stringstream buf;
  save_model(LinearModel(2, 1, LinearLoss::kSoftmaxCe, {}), buf);
  const auto bytes = buf.str();
  CHECK(bytes[0] == 1);
  CHECK(bytes[1] == 1);
  // version, kind, classes, dim, reg tag, lambda, count, 4 params
  CHECK(bytes.size() == 1 + 1 + 4 + 4 + 1 + 8 + 8 + 4 * 8);
}

TEST_CASE("load_model rejects bad versions, kinds and truncation") {
  std::stringstream good;
  save_model(CnnHead(2, 2, {1, 1}), good);
  auto bytes = good.str();

  auto bad_version = bytes;
  bad_version[0] = 9;
  std::istringstream a(bad_version);
  CHECK_THROWS_AS(load_model(a), DataError);

  auto bad_kind = bytes;
  bad_kind[1] = 77;
  std::istringstream b(bad_kind);
  CHECK_THROWS_AS(load_model(b), DataError);

  std::istringstream c(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(load_model(c), DataError);
}
