#include <sstream>

#include "doctest.h"
#include "poolbench/corpus.hpp"
#include "poolbench/errors.hpp"
#include "poolbench/rng.hpp"

using namespace poolbench;

namespace {

std::vector<Statement> parse(const std::string& text, Split split = Split::kTrain) {
  std::istringstream in(text);
  return parse_liar_tsv(in, split);
}

}  // namespace

TEST_CASE("consolidate maps all six labels to their coarse class") {
  CHECK(consolidate(FineLabel::kPantsOnFire) == CoarseLabel::kFake);
  CHECK(consolidate(FineLabel::kFalse) == CoarseLabel::kFake);
  CHECK(consolidate(FineLabel::kBarelyTrue) == CoarseLabel::kPartiallyTrue);
  CHECK(consolidate(FineLabel::kHalfTrue) == CoarseLabel::kPartiallyTrue);
  CHECK(consolidate(FineLabel::kMostlyTrue) == CoarseLabel::kTrue);
  CHECK(consolidate(FineLabel::kTrue) == CoarseLabel::kTrue);
}

TEST_CASE("parse_liar_tsv maps columns directly") {
  const auto s = parse("1234.json\tfalse\tSays X did Y.\n");
  REQUIRE(s.size() == 1);
  CHECK(s[0].id == "1234.json");
  CHECK(s[0].fine_label == FineLabel::kFalse);
  CHECK(s[0].text == "Says X did Y.");
  CHECK(s[0].split == Split::kTrain);
}

TEST_CASE("the on-disk pants-fire spelling is accepted") {
  const auto s = parse("9.json\tpants-fire\tSays something outrageous.\n"
                       "10.json\tpants-on-fire\tAnother one.\n");
  REQUIRE(s.size() == 2);
  CHECK(s[0].fine_label == FineLabel::kPantsOnFire);
  CHECK(s[1].fine_label == FineLabel::kPantsOnFire);
  CHECK(fine_label_name(FineLabel::kPantsOnFire) == "pants-fire");
}

TEST_CASE("labels are matched after trimming and lowercasing") {
  const auto s = parse("1.json\t Half-True \ttext\n");
  CHECK(s.at(0).fine_label == FineLabel::kHalfTrue);
}

TEST_CASE("metadata columns beyond the third are ignored") {
  const auto s = parse("1.json\ttrue\tSome text\tspeaker\tjob\tstate\tparty\t1\t2\t3\t4\t5\tvenue\n",
                       Split::kTest);
  REQUIRE(s.size() == 1);
  CHECK(s[0].text == "Some text");
  CHECK(s[0].split == Split::kTest);
}

TEST_CASE("empty file and blank lines") {
  CHECK(parse("").empty());
  CHECK(parse("\n\n  \n").empty());
  CHECK(parse("1.json\ttrue\ta\n\n2.json\tfalse\tb\n").size() == 2);
}

TEST_CASE("CRLF line endings are accepted") {
  const auto s = parse("1.json\ttrue\tfirst\r\n2.json\tfalse\tsecond\r\n");
  REQUIRE(s.size() == 2);
  CHECK(s[0].text == "first");
  CHECK(s[1].text == "second");
}

TEST_CASE("malformed lines report their 1-based line number") {
  try {
    parse("1.json\ttrue\tok\n2.json\tfalse\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("unknown labels are named in the error") {
  try {
    parse("1.json\tmostly-false\ttext\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("mostly-false") != std::string::npos);
  }
}

TEST_CASE("empty statement text and empty ids are rejected") {
  CHECK_THROWS_AS(parse("1.json\ttrue\t   \n"), DataError);
  CHECK_THROWS_AS(parse("\ttrue\ttext\n"), DataError);
}

TEST_CASE("invalid UTF-8 is rejected") {
  CHECK_THROWS_AS(parse("1.json\ttrue\tbad \xC3\x28 byte\n"), DataError);
  CHECK_THROWS_AS(parse("1.json\ttrue\toverlong \xC0\xAF\n"), DataError);
  CHECK_NOTHROW(parse("1.json\ttrue\tcaf\xC3\xA9 \xE2\x80\x9Cquoted\xE2\x80\x9D\n"));
}

TEST_CASE("duplicate ids are rejected by Corpus") {
  auto a = parse("1.json\ttrue\ta\n");
  auto b = parse("1.json\tfalse\tb\n", Split::kTest);
  a.push_back(b[0]);
  CHECK_THROWS_AS(Corpus{a}, DataError);
}

TEST_CASE("tally of an empty corpus is all zeros") {
  const auto t = tally(Corpus{});
  CHECK(t.total() == 0);
  for (auto s : kAllSplits) CHECK(t.split_total(s) == 0);
  for (auto f : kAllFineLabels) CHECK(t.fine_total(f) == 0);
}

TEST_CASE("property: tally totals equal list lengths and TSV round-trips") {
  Rng rng(7);
  const char* words[] = {"alpha", "beta", "gamma", "caf\xC3\xA9", "x", "\"quoted\"", "a,b"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Statement> all;
    for (auto split : kAllSplits) {
      const auto n = rng.below(20);
      for (std::uint64_t i = 0; i < n; ++i) {
        Statement s;
        s.id = std::string(split_name(split)) + std::to_string(i) + ".json";
        s.fine_label = kAllFineLabels[rng.below(6)];
        s.split = split;
        const auto len = 1 + rng.below(6);
        for (std::uint64_t w = 0; w < len; ++w) {
          if (w) s.text += ' ';
          s.text += words[rng.below(std::size(words))];
        }
        all.push_back(s);
      }
    }
    const Corpus corpus(all);
    const auto t = tally(corpus);
    CHECK(t.total() == all.size());
    std::size_t by_fine = 0, by_coarse = 0;
    for (auto f : kAllFineLabels) by_fine += t.fine_total(f);
    for (auto c : {CoarseLabel::kFake, CoarseLabel::kPartiallyTrue, CoarseLabel::kTrue}) {
      by_coarse += t.coarse_total(c);
    }
    CHECK(by_fine == all.size());
    CHECK(by_coarse == all.size());

    for (auto split : kAllSplits) {
      std::vector<Statement> part;
      for (const auto* s : corpus.split(split)) part.push_back(*s);
      CHECK(t.split_total(split) == part.size());
      std::ostringstream out;
      write_liar_tsv(out, part);
      std::istringstream in(out.str());
      CHECK(parse_liar_tsv(in, split) == part);
    }
  }
}

TEST_CASE("render_tally shows coarse rows for the 3-label scheme") {
  auto s = parse("1.json\tpants-fire\ta\n2.json\ttrue\tb\n3.json\thalf-true\tc\n");
  const auto text = render_tally(tally(Corpus(s)), 3);
  CHECK(text.find("Fake") != std::string::npos);
  CHECK(text.find("PartiallyTrue") != std::string::npos);
  const auto six = render_tally(tally(Corpus(s)), 6);
  CHECK(six.find("pants-fire") != std::string::npos);
}

TEST_CASE("class_index for both label schemes") {
  Statement s;
  s.fine_label = FineLabel::kBarelyTrue;
  CHECK(class_index(s, 6) == 2);
  CHECK(class_index(s, 3) == 1);
  CHECK_THROWS_AS(class_index(s, 2), ConfigError);
}
