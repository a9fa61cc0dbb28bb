#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "poolbench/experiment.hpp"

namespace poolbench {

enum class ReportShape { kRq1, kRq3, kSweep };

std::string_view report_shape_name(ReportShape shape);
ReportShape parse_report_shape(std::string_view text);

struct Report {
  std::string text;  // aligned plain text
  std::string csv;   // RFC 4180, CRLF line endings
};

// rq1: per (embedding, labels, head) the accuracy of each pooling mode and the
// best one (ties go to max, then avg, then min). rq3: best accuracy per
// embedding and head, columns LR, SVM, Bi-LSTM, CNN (those present). sweep:
// accuracy and macro-F1 per padded length and head.
// Throws ConfigError for empty input or results that do not fit the shape.
Report render_report(const std::vector<RunResult>& results, ReportShape shape);

// Shortest decimal that round-trips to the same double.
std::string format_real(double v);

std::string csv_escape(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);

// One JSON object per line, fields in a fixed order. wall_time is written only
// when include_timing is set, so logs of identical runs are byte-identical.
std::string run_result_to_json(const RunResult& r, bool include_timing = false);
RunResult run_result_from_json(std::string_view line);
std::vector<RunResult> read_run_log(std::istream& in);

}  // namespace poolbench
