#include "poolbench/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "poolbench/errors.hpp"
#include "poolbench/utf8.hpp"

namespace poolbench {

CoarseLabel consolidate(FineLabel fine) {
  switch (fine) {
    case FineLabel::kPantsOnFire:
    case FineLabel::kFalse:
      return CoarseLabel::kFake;
    case FineLabel::kBarelyTrue:
    case FineLabel::kHalfTrue:
      return CoarseLabel::kPartiallyTrue;
    case FineLabel::kMostlyTrue:
    case FineLabel::kTrue:
      return CoarseLabel::kTrue;
  }
  return CoarseLabel::kTrue;
}

FineLabel parse_fine_label(std::string_view text) {
  std::string key(utf8::trim_ascii(text));
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "pants-fire" || key == "pants-on-fire") return FineLabel::kPantsOnFire;
  if (key == "false") return FineLabel::kFalse;
  if (key == "barely-true") return FineLabel::kBarelyTrue;
  if (key == "half-true") return FineLabel::kHalfTrue;
  if (key == "mostly-true") return FineLabel::kMostlyTrue;
  if (key == "true") return FineLabel::kTrue;
  throw DataError("unknown label '" + std::string(text) + "'");
}

std::string_view fine_label_name(FineLabel label) {
  switch (label) {
    case FineLabel::kPantsOnFire: return "pants-fire";
    case FineLabel::kFalse: return "false";
    case FineLabel::kBarelyTrue: return "barely-true";
    case FineLabel::kHalfTrue: return "half-true";
    case FineLabel::kMostlyTrue: return "mostly-true";
    case FineLabel::kTrue: return "true";
  }
  return "?";
}

std::string_view coarse_label_name(CoarseLabel label) {
  switch (label) {
    case CoarseLabel::kFake: return "Fake";
    case CoarseLabel::kPartiallyTrue: return "PartiallyTrue";
    case CoarseLabel::kTrue: return "True";
  }
  return "?";
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "?";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "valid") return Split::kValid;
  if (text == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(text) + "'");
}

std::size_t class_index(const Statement& s, int num_labels) {
  if (num_labels == 6) return static_cast<std::size_t>(s.fine_label);
  if (num_labels == 3) return static_cast<std::size_t>(consolidate(s.fine_label));
  throw ConfigError("label scheme must be 3 or 6, got " + std::to_string(num_labels));
}

std::vector<Statement> parse_liar_tsv(std::istream& in, Split split) {
  const std::string raw{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (auto bad = utf8::find_invalid(raw)) {
    const auto line = 1 + std::count(raw.begin(), raw.begin() + static_cast<long>(*bad), '\n');
    throw DataError("invalid UTF-8 at byte offset " + std::to_string(*bad) + " (line " +
                    std::to_string(line) + ")");
  }

  std::vector<Statement> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t end = raw.find('\n', pos);
    if (end == std::string::npos) end = raw.size();
    std::string_view line(raw.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (utf8::trim_ascii(line).empty()) continue;

    std::vector<std::string_view> cols;
    std::size_t c = 0;
    while (cols.size() < 3) {
      const std::size_t tab = line.find('\t', c);
      if (tab == std::string_view::npos) {
        cols.push_back(line.substr(c));
        break;
      }
      cols.push_back(line.substr(c, tab - c));
      c = tab + 1;
    }
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (cols.size() < 3) {
      throw DataError(where + "expected at least 3 tab-separated columns, found " +
                      std::to_string(cols.size()));
    }
    Statement s;
    s.id = std::string(utf8::trim_ascii(cols[0]));
    if (s.id.empty()) throw DataError(where + "empty statement id");
    try {
      s.fine_label = parse_fine_label(cols[1]);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    if (utf8::trim_ascii(cols[2]).empty()) throw DataError(where + "empty statement text");
    s.text = std::string(cols[2]);
    s.split = split;
    out.push_back(std::move(s));
  }
  return out;
}

void write_liar_tsv(std::ostream& out, const std::vector<Statement>& statements) {
  for (const auto& s : statements) {
    out << s.id << '\t' << fine_label_name(s.fine_label) << '\t' << s.text << '\n';
  }
}

std::size_t Tally::split_total(Split split) const {
  const auto& row = counts[static_cast<std::size_t>(split)];
  std::size_t n = 0;
  for (auto c : row) n += c;
  return n;
}

std::size_t Tally::fine_total(FineLabel label) const {
  std::size_t n = 0;
  for (const auto& row : counts) n += row[static_cast<std::size_t>(label)];
  return n;
}

std::size_t Tally::coarse_in_split(Split split, CoarseLabel label) const {
  std::size_t n = 0;
  for (auto fine : kAllFineLabels) {
    if (consolidate(fine) == label) {
      n += counts[static_cast<std::size_t>(split)][static_cast<std::size_t>(fine)];
    }
  }
  return n;
}

std::size_t Tally::coarse_total(CoarseLabel label) const {
  std::size_t n = 0;
  for (auto split : kAllSplits) n += coarse_in_split(split, label);
  return n;
}

std::size_t Tally::total() const {
  std::size_t n = 0;
  for (auto split : kAllSplits) n += split_total(split);
  return n;
}

Corpus::Corpus(std::vector<Statement> statements) : statements_(std::move(statements)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(statements_.size());
  for (const auto& s : statements_) {
    if (!seen.insert(s.id).second) throw DataError("duplicate statement id '" + s.id + "'");
  }
}

Corpus Corpus::load_dir(const std::filesystem::path& dir) {
  std::vector<Statement> all;
  for (auto split : kAllSplits) {
    const auto path = dir / (std::string(split_name(split)) + ".tsv");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    try {
      auto part = parse_liar_tsv(in, split);
      std::move(part.begin(), part.end(), std::back_inserter(all));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return Corpus(std::move(all));
}

std::vector<const Statement*> Corpus::split(Split split) const {
  std::vector<const Statement*> out;
  for (const auto& s : statements_) {
    if (s.split == split) out.push_back(&s);
  }
  return out;
}

Tally tally(const Corpus& corpus) {
  Tally t;
  for (const auto& s : corpus.statements()) {
    ++t.counts[static_cast<std::size_t>(s.split)][static_cast<std::size_t>(s.fine_label)];
  }
  return t;
}

std::string render_tally(const Tally& t, int num_labels) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "label";
  for (auto split : kAllSplits) os << std::right << std::setw(8) << split_name(split);
  os << std::setw(8) << "total" << '\n';
  const auto row = [&](std::string_view name, auto count_in) {
    os << std::left << std::setw(16) << name;
    std::size_t sum = 0;
    for (auto split : kAllSplits) {
      const std::size_t n = count_in(split);
      sum += n;
      os << std::right << std::setw(8) << n;
    }
    os << std::setw(8) << sum << '\n';
  };
  if (num_labels == 6) {
    for (auto fine : kAllFineLabels) {
      row(fine_label_name(fine), [&](Split s) {
        return t.counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(fine)];
      });
    }
  } else {
    for (auto coarse : {CoarseLabel::kFake, CoarseLabel::kPartiallyTrue, CoarseLabel::kTrue}) {
      row(coarse_label_name(coarse), [&](Split s) { return t.coarse_in_split(s, coarse); });
    }
  }
  row("all", [&](Split s) { return t.split_total(s); });
  return os.str();
}

}  // namespace poolbench
