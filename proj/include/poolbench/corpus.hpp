#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace poolbench {

// Six-way LIAR truthfulness rating, ordered from least to most truthful.
enum class FineLabel { kPantsOnFire = 0, kFalse, kBarelyTrue, kHalfTrue, kMostlyTrue, kTrue };

// Three-way consolidated rating.
enum class CoarseLabel { kFake = 0, kPartiallyTrue, kTrue };

enum class Split { kTrain = 0, kValid, kTest };

inline constexpr std::size_t kNumFineLabels = 6;
inline constexpr std::size_t kNumCoarseLabels = 3;
inline constexpr std::size_t kNumSplits = 3;

inline constexpr std::array<FineLabel, kNumFineLabels> kAllFineLabels = {
    FineLabel::kPantsOnFire, FineLabel::kFalse,      FineLabel::kBarelyTrue,
    FineLabel::kHalfTrue,    FineLabel::kMostlyTrue, FineLabel::kTrue};
inline constexpr std::array<Split, kNumSplits> kAllSplits = {Split::kTrain, Split::kValid,
                                                             Split::kTest};

CoarseLabel consolidate(FineLabel fine);

// Parses a label as it appears in the LIAR files. Matching is done after
// trimming and lowercasing; both "pants-fire" (the on-disk spelling) and
// "pants-on-fire" are accepted. Throws DataError for anything else.
FineLabel parse_fine_label(std::string_view text);

// Canonical names. fine_label_name returns the on-disk LIAR spelling.
std::string_view fine_label_name(FineLabel label);
std::string_view coarse_label_name(CoarseLabel label);
std::string_view split_name(Split split);
Split parse_split(std::string_view text);

struct Statement {
  std::string id;
  std::string text;
  FineLabel fine_label = FineLabel::kFalse;
  Split split = Split::kTrain;

  bool operator==(const Statement&) const = default;
};

// Class index of a statement under the 3- or 6-label scheme.
std::size_t class_index(const Statement& s, int num_labels);

// Reads one LIAR TSV stream. Lines are "id \t label \t text [\t metadata...]";
// only the first three columns are used. Accepts LF and CRLF line endings.
std::vector<Statement> parse_liar_tsv(std::istream& in, Split split);

// Writes statements in the three-column layout parse_liar_tsv reads.
void write_liar_tsv(std::ostream& out, const std::vector<Statement>& statements);

struct Tally {
  // counts[split][fine label]
  std::array<std::array<std::size_t, kNumFineLabels>, kNumSplits> counts{};

  std::size_t split_total(Split split) const;
  std::size_t fine_total(FineLabel label) const;
  std::size_t coarse_total(CoarseLabel label) const;
  std::size_t coarse_in_split(Split split, CoarseLabel label) const;
  std::size_t total() const;
};

class Corpus {
 public:
  Corpus() = default;
  // Throws DataError on duplicate ids.
  explicit Corpus(std::vector<Statement> statements);

  // Loads train.tsv, valid.tsv and test.tsv from a directory.
  static Corpus load_dir(const std::filesystem::path& dir);

  const std::vector<Statement>& statements() const { return statements_; }
  std::vector<const Statement*> split(Split split) const;
  std::size_t size() const { return statements_.size(); }
  bool empty() const { return statements_.empty(); }

 private:
  std::vector<Statement> statements_;
};

Tally tally(const Corpus& corpus);

// Aligned plain-text rendering of a tally for the given label scheme.
std::string render_tally(const Tally& t, int num_labels);

}  // namespace poolbench
