#include "poolbench/report.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "poolbench/errors.hpp"

namespace poolbench {

using ordered_json = nlohmann::ordered_json;

std::string_view report_shape_name(ReportShape shape) {
  switch (shape) {
    case ReportShape::kRq1: return "rq1";
    case ReportShape::kRq3: return "rq3";
    case ReportShape::kSweep: return "sweep";
  }
  return "?";
}

ReportShape parse_report_shape(std::string_view text) {
  if (text == "rq1") return ReportShape::kRq1;
  if (text == "rq3") return ReportShape::kRq3;
  if (text == "sweep") return ReportShape::kSweep;
  throw ConfigError("unknown report shape '" + std::string(text) + "' (expected rq1, rq3, sweep)");
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_escape(fields[i]);
  }
  out += "\r\n";
  return out;
}

namespace {

std::string percent(double fraction) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * fraction;
  return os.str();
}

// Renders rows of cells with columns padded to their widest entry.
std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i > 0) line += "  ";
      const auto& cell = rows[r][i];
      // First column left-aligned, the rest right-aligned.
      if (i == 0) {
        line += cell + std::string(width[i] - cell.size(), ' ');
      } else {
        line += std::string(width[i] - cell.size(), ' ') + cell;
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
    }
  }
  return out;
}

std::string embedding_label(const RunResult& r) {
  return r.config.embedding_source + (r.config.labels == 6 ? " (6-way)" : "");
}

Report render_rq1(const std::vector<RunResult>& results) {
  struct Cell {
    std::optional<double> acc[3];
    double majority = 0.0;
  };
  // Key: embedding, labels, head order.
  std::map<std::tuple<std::string, int, int>, Cell> cells;
  for (const auto& r : results) {
    if (r.config.aggregation.padded) {
      throw ConfigError("rq1 report takes pooled runs only, got " + r.config.aggregation.name());
    }
    auto& cell = cells[{r.config.embedding_source, r.config.labels, static_cast<int>(r.config.head)}];
    auto& slot = cell.acc[static_cast<int>(r.config.aggregation.mode)];
    slot = std::max(slot.value_or(r.accuracy), r.accuracy);
    cell.majority = r.majority_baseline;
  }
  const PoolMode order[] = {PoolMode::kMax, PoolMode::kAvg, PoolMode::kMin};
  std::vector<std::vector<std::string>> table = {
      {"embedding", "head", "max", "avg", "min", "best", "accuracy", "majority"}};
  std::string csv = csv_row({"embedding", "labels", "head", "max", "avg", "min", "best_pooling",
                             "best_accuracy", "majority_baseline"});
  for (const auto& [key, cell] : cells) {
    const auto& [embedding, labels, head_index] = key;
    const auto head = static_cast<HeadKind>(head_index);
    std::optional<PoolMode> best;
    for (auto m : order) {
      const auto& a = cell.acc[static_cast<int>(m)];
      if (a && (!best || *a > *cell.acc[static_cast<int>(*best)])) best = m;
    }
    const double best_acc = *cell.acc[static_cast<int>(*best)];
    std::vector<std::string> text_row = {
        embedding + (labels == 6 ? " (6-way)" : ""), std::string(head_title(head))};
    std::vector<std::string> csv_fields = {embedding, std::to_string(labels),
                                           std::string(head_name(head))};
    for (auto m : order) {
      const auto& a = cell.acc[static_cast<int>(m)];
      text_row.push_back(a ? percent(*a) : "-");
      csv_fields.push_back(a ? format_real(*a) : "");
    }
    text_row.push_back(std::string(pool_mode_name(*best)));
    text_row.push_back(percent(best_acc));
    text_row.push_back(percent(cell.majority));
    csv_fields.push_back(std::string(pool_mode_name(*best)));
    csv_fields.push_back(format_real(best_acc));
    csv_fields.push_back(format_real(cell.majority));
    table.push_back(std::move(text_row));
    csv += csv_row(csv_fields);
  }
  return {"Best pooling method by embedding (test accuracy, %)\n" + align(table), csv};
}

Report render_rq3(const std::vector<RunResult>& results) {
  std::map<std::pair<std::string, int>, std::map<int, double>> best;
  std::vector<bool> present(std::size(kAllHeads), false);
  for (const auto& r : results) {
    auto& row = best[{r.config.embedding_source, r.config.labels}];
    const int h = static_cast<int>(r.config.head);
    present[static_cast<std::size_t>(h)] = true;
    const auto it = row.find(h);
    if (it == row.end() || r.accuracy > it->second) row[h] = r.accuracy;
  }
  std::vector<std::string> header = {"embedding"};
  std::vector<std::string> csv_header = {"embedding", "labels"};
  for (auto h : kAllHeads) {
    if (!present[static_cast<std::size_t>(h)]) continue;
    header.emplace_back(head_title(h));
    csv_header.emplace_back(head_name(h));
  }
  std::vector<std::vector<std::string>> table = {header};
  std::string csv = csv_row(csv_header);
  for (const auto& [key, row] : best) {
    std::vector<std::string> text_row = {key.first + (key.second == 6 ? " (6-way)" : "")};
    std::vector<std::string> csv_fields = {key.first, std::to_string(key.second)};
    for (auto h : kAllHeads) {
      if (!present[static_cast<std::size_t>(h)]) continue;
      const auto it = row.find(static_cast<int>(h));
      text_row.push_back(it == row.end() ? "-" : percent(it->second));
      csv_fields.push_back(it == row.end() ? "" : format_real(it->second));
    }
    table.push_back(std::move(text_row));
    csv += csv_row(csv_fields);
  }
  return {"Best accuracy (%) by embedding and classifier\n" + align(table), csv};
}

Report render_sweep(const std::vector<RunResult>& results) {
  std::vector<const RunResult*> sorted;
  for (const auto& r : results) {
    if (!r.config.aggregation.padded) {
      throw ConfigError("sweep report takes padded runs only, got " + r.config.aggregation.name());
    }
    sorted.push_back(&r);
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const RunResult* a, const RunResult* b) {
    const auto ka = std::make_tuple(a->config.embedding_source, a->config.labels,
                                    static_cast<int>(a->config.head), a->config.aggregation.length);
    const auto kb = std::make_tuple(b->config.embedding_source, b->config.labels,
                                    static_cast<int>(b->config.head), b->config.aggregation.length);
    return ka < kb;
  });
  std::vector<std::vector<std::string>> table = {
      {"embedding", "head", "length", "accuracy", "macro_f1"}};
  std::string csv = csv_row({"embedding", "labels", "head", "length", "accuracy", "macro_f1"});
  for (const auto* r : sorted) {
    table.push_back({embedding_label(*r), std::string(head_title(r->config.head)),
                     std::to_string(r->config.aggregation.length), percent(r->accuracy),
                     percent(r->macro_f1)});
    csv += csv_row({r->config.embedding_source, std::to_string(r->config.labels),
                    std::string(head_name(r->config.head)),
                    std::to_string(r->config.aggregation.length), format_real(r->accuracy),
                    format_real(r->macro_f1)});
  }
  std::string text = "Accuracy vs. maximum sequence length\n" + align(table);
  text +=
      "\nReference lines (literature values, not recomputed):\n"
      "  Khurana linguistic features, 3-way   49.03%\n"
      "  majority baseline (literature)       44.28%\n";
  return {text, csv};
}

}  // namespace

Report render_report(const std::vector<RunResult>& results, ReportShape shape) {
  if (results.empty()) throw ConfigError("cannot render a report from zero results");
  switch (shape) {
    case ReportShape::kRq1: return render_rq1(results);
    case ReportShape::kRq3: return render_rq3(results);
    case ReportShape::kSweep: return render_sweep(results);
  }
  throw ConfigError("unknown report shape");
}

std::string run_result_to_json(const RunResult& r, bool include_timing) {
  const auto& c = r.config;
  ordered_json j;
  j["fingerprint"] = r.fingerprint;
  j["seed"] = r.seed;
  j["embedding"] = c.embedding_source;
  j["labels"] = c.labels;
  j["aggregation"] = c.aggregation.name();
  j["head"] = head_name(c.head);
  j["reg"] = reg_kind_name(c.reg.kind);
  j["lambda"] = c.reg.lambda;
  j["learning_rate"] = c.train.learning_rate;
  j["epochs"] = c.train.epochs;
  j["batch_size"] = c.train.batch_size;
  j["dropout_keep"] = c.train.dropout_keep;
  j["optimizer"] = optimizer_name(c.train.optimizer);
  j["kernel_width"] = c.cnn.kernel_width;
  j["filters"] = c.cnn.filters;
  j["hidden"] = c.bilstm.hidden;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["majority_baseline"] = r.majority_baseline;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  if (include_timing) j["wall_time"] = r.wall_time;
  return j.dump();
}

RunResult run_result_from_json(std::string_view line) {
  try {
    const auto j = ordered_json::parse(line);
    RunResult r;
    auto& c = r.config;
    c.embedding_source = j.at("embedding").get<std::string>();
    c.labels = j.at("labels").get<int>();
    c.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
    c.head = parse_head(j.at("head").get<std::string>());
    c.reg.kind = parse_reg_kind(j.at("reg").get<std::string>());
    c.reg.lambda = j.at("lambda").get<double>();
    c.train.learning_rate = j.at("learning_rate").get<double>();
    c.train.epochs = j.at("epochs").get<int>();
    c.train.batch_size = j.at("batch_size").get<int>();
    c.train.dropout_keep = j.at("dropout_keep").get<double>();
    c.train.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
    c.train.seed = j.at("seed").get<std::uint64_t>();
    c.cnn.kernel_width = j.at("kernel_width").get<std::size_t>();
    c.cnn.filters = j.at("filters").get<std::size_t>();
    c.bilstm.hidden = j.at("hidden").get<std::size_t>();
    r.fingerprint = j.at("fingerprint").get<std::string>();
    r.seed = c.train.seed;
    r.accuracy = j.at("accuracy").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    r.majority_baseline = j.at("majority_baseline").get<double>();
    r.precision = j.at("precision").get<std::vector<double>>();
    r.recall = j.at("recall").get<std::vector<double>>();
    r.train_size = j.at("train_size").get<std::size_t>();
    r.test_size = j.at("test_size").get<std::size_t>();
    if (j.contains("wall_time")) r.wall_time = j.at("wall_time").get<double>();
    if (r.fingerprint != c.fingerprint()) {
      throw DataError("fingerprint " + r.fingerprint + " does not match the recorded config");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad run log record: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("bad run log record: ") + e.what());
  }
}

std::vector<RunResult> read_run_log(std::istream& in) {
  std::vector<RunResult> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(run_result_from_json(line));
    } catch (const DataError& e) {
      throw DataError("run log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace poolbench
