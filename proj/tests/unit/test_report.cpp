#include <sstream>

#include "doctest.h"
#include "poolbench/errors.hpp"
#include "poolbench/report.hpp"

using namespace poolbench;

namespace {

using Rows = std::vector<std::vector<std::string>>;

// Minimal RFC 4180 reader; requires CRLF record terminators.
Rows parse_csv(const std::string& s) {
  Rows rows;
  std::vector<std::string> row;
  std::string field;
  std::size_t i = 0;
  bool quoted = false;
  while (i < s.size()) {
    const char c = s[i];
    if (quoted) {
      if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
        field += '"';
        i += 2;
      } else if (c == '"') {
        quoted = false;
        ++i;
      } else {
        field += c;
        ++i;
      }
    } else if (c == '"') {
      quoted = true;
      ++i;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      ++i;
    } else if (c == '\r') {
      REQUIRE(i + 1 < s.size());
      REQUIRE(s[i + 1] == '\n');
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      i += 2;
    } else {
      REQUIRE(c != '\n');
      field += c;
      ++i;
    }
  }
  REQUIRE(field.empty());
  REQUIRE(row.empty());
  return rows;
}

RunResult make_result(const std::string& emb, HeadKind head, Aggregation agg, double acc) {
  RunResult r;
  r.config.embedding_source = emb;
  r.config.head = head;
  r.config.aggregation = agg;
  r.fingerprint = r.config.fingerprint();
  r.seed = r.config.train.seed;
  r.accuracy = acc;
  r.macro_f1 = acc / 2.0;
  r.precision = {0.1, 0.2, 0.3};
  r.recall = {0.4, 0.5, 0.6};
  r.majority_baseline = 0.45;
  r.train_size = 400;
  r.test_size = 100;
  r.wall_time = 1.25;
  return r;
}

}  // namespace

TEST_CASE("csv escaping") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(csv_row({"x", "y,z"}) == "x,\"y,z\"\r\n");
  const auto rows = parse_csv(csv_row({"a\"b", "c,d", "e\r\nf", ""}));
  CHECK(rows == Rows{{"a\"b", "c,d", "e\r\nf", ""}});
}

TEST_CASE("format_real is the shortest round-tripping form") {
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1.0 / 3.0) == "0.3333333333333333");
  for (double v : {0.123456789, 1e-300, 44.28, 0.0}) {
    CHECK(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("rq1 yields one row per embedding and head with tie-broken best pooling") {
  const std::vector<RunResult> single = {
      make_result("pseudo:32", HeadKind::kLogReg, Aggregation::pooled(PoolMode::kAvg), 0.5)};
  auto rows = parse_csv(render_report(single, ReportShape::kRq1).csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<std::string>{"pseudo:32", "3", "logreg", "", "0.5", "", "avg",
                                            "0.5", "0.45"});

  std::vector<RunResult> results;
  for (auto m : {PoolMode::kMin, PoolMode::kAvg, PoolMode::kMax}) {
    results.push_back(make_result("pseudo:32", HeadKind::kSvm, Aggregation::pooled(m),
                                  m == PoolMode::kMax ? 0.4 : 0.6));
  }
  rows = parse_csv(render_report(results, ReportShape::kRq1).csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][6] == "avg");
  CHECK(rows[1][7] == "0.6");
  const auto text = render_report(results, ReportShape::kRq1).text;
  CHECK(text.find("60.00") != std::string::npos);

  results.push_back(make_result("pseudo:32", HeadKind::kCnn, Aggregation::pad(40), 0.5));
  CHECK_THROWS_AS(render_report(results, ReportShape::kRq1), ConfigError);
}

TEST_CASE("rq3 columns follow LR, SVM, Bi-LSTM, CNN") {
  std::vector<RunResult> results = {
      make_result("e", HeadKind::kCnn, Aggregation::pad(40), 0.41),
      make_result("e", HeadKind::kBiLstm, Aggregation::pad(40), 0.42),
      make_result("e", HeadKind::kSvm, Aggregation::pooled(PoolMode::kMax), 0.43),
      make_result("e", HeadKind::kLogReg, Aggregation::pooled(PoolMode::kMax), 0.44),
      make_result("e", HeadKind::kLogReg, Aggregation::pooled(PoolMode::kMin), 0.40),
  };
  const auto report = render_report(results, ReportShape::kRq3);
  const auto rows = parse_csv(report.csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"embedding", "labels", "logreg", "svm", "bilstm", "cnn"});
  CHECK(rows[1] == std::vector<std::string>{"e", "3", "0.44", "0.43", "0.42", "0.41"});
  const auto lr = report.text.find("LR");
  const auto svm = report.text.find("SVM");
  const auto lstm = report.text.find("Bi-LSTM");
  const auto cnn = report.text.find("CNN");
  CHECK(lr < svm);
  CHECK(svm < lstm);
  CHECK(lstm < cnn);
}

TEST_CASE("sweep rows are ordered by length and carry reference lines") {
  std::vector<RunResult> results;
  for (std::size_t len : {40u, 15u, 25u}) {
    results.push_back(make_result("e", HeadKind::kCnn, Aggregation::pad(len), 0.4));
  }
  const auto report = render_report(results, ReportShape::kSweep);
  const auto rows = parse_csv(report.csv);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][3] == "15");
  CHECK(rows[2][3] == "25");
  CHECK(rows[3][3] == "40");
  CHECK(report.text.find("49.03%") != std::string::npos);
  CHECK(report.text.find("44.28%") != std::string::npos);
  results.push_back(make_result("e", HeadKind::kSvm, Aggregation::pooled(PoolMode::kMax), 0.4));
  CHECK_THROWS_AS(render_report(results, ReportShape::kSweep), ConfigError);
}

TEST_CASE("empty input and unknown shapes are errors") {
  CHECK_THROWS_AS(render_report({}, ReportShape::kRq3), ConfigError);
  CHECK_THROWS_AS(parse_report_shape("rq2"), ConfigError);
  CHECK(parse_report_shape("sweep") == ReportShape::kSweep);
}

TEST_CASE("run log records round-trip") {
  auto r = make_result("pseudo:32", HeadKind::kBiLstm, Aggregation::pad(25), 1.0 / 3.0);
  r.config.labels = 6;
  r.config.reg = {RegKind::kL1, 0.5};
  r.config.train.seed = 7;
  r.seed = 7;
  r.fingerprint = r.config.fingerprint();
  const auto line = run_result_to_json(r);
  CHECK(line.find("wall_time") == std::string::npos);
  CHECK(line.find('\n') == std::string::npos);
  const auto back = run_result_from_json(line);
  CHECK(back.fingerprint == r.fingerprint);
  CHECK(back.config.fingerprint() == r.config.fingerprint());
  CHECK(back.accuracy == r.accuracy);
  CHECK(back.macro_f1 == r.macro_f1);
  CHECK(back.precision == r.precision);
  CHECK(back.recall == r.recall);
  CHECK(back.majority_baseline == r.majority_baseline);
  CHECK(run_result_to_json(back) == line);

  const auto timed = run_result_from_json(run_result_to_json(r, true));
  CHECK(timed.wall_time == r.wall_time);

  std::istringstream log(line + "\n\n" + line + "\n");
  CHECK(read_run_log(log).size() == 2);
  auto tampered = line;
  tampered.replace(tampered.find("\"epochs\":5"), 10, "\"epochs\":6");
  CHECK_THROWS_WITH_AS(run_result_from_json(tampered), doctest::Contains("does not match"), DataError);
  std::istringstream broken(line + "\n{\"fingerprint\": 3}\n");
  CHECK_THROWS_WITH_AS(read_run_log(broken), doctest::Contains("line 2"), DataError);
}
