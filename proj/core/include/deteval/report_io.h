// EvalReport serialization.
//
// JSON layout:
//   {config, manifest, calibration_refused?,
//    classes: {name: {frames, labels, detections,
//                     filters: {name: {filter, counts, ap, brier: {labels, detections, union},
//                                      calibration_l2, curve, recall_violations,
//                                      calibration}}}}}
// Absent values (empty Brier support, empty calibration bin) are null.
// Floating-point values are written with 9 significant digits.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "deteval/evaluate.h"

namespace deteval {

enum class ReportFormat { kJson, kCsv };

ReportFormat parse_report_format(std::string_view text);

inline constexpr int kReportSignificantDigits = 9;

std::string report_to_json_text(const EvalReport& report, int indent = 2);
// Throws InvalidArgument on malformed or schema-violating input.
EvalReport report_from_json_text(std::string_view text);

// JSON of the configuration alone (the "config" member of a report).
std::string config_to_json_text(const EvalConfig& config);

// JSON: `path` is the output file. CSV: `path` is a directory receiving
// summary.csv plus <class>.<filter>.{pr,roc,calibration}.csv, each with a
// header row. Throws DataError on I/O failure.
void write_report(const EvalReport& report, const std::filesystem::path& path,
                  ReportFormat format);

// File-name-safe rendering of a class or filter name.
std::string sanitize_file_component(std::string_view name);

}  // namespace deteval
