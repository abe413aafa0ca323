// End-to-end evaluation over a set of frames.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deteval/counts.h"
#include "deteval/dataset.h"
#include "deteval/metrics.h"
#include "deteval/records.h"

namespace deteval {

std::string_view engine_version();

inline constexpr const char* kUnfilteredName = "all";

struct FilterReport {
  std::string expression;  // canonical filter text, empty for "all"
  ConfusionCounts counts;  // at the min_confidence cut
  double ap = 0.0;
  // One entry per configured support; nullopt when the support is empty or
  // the scores are not probabilities.
  std::map<BrierSupport, std::optional<double>> brier;
  std::optional<double> calibration_l2;
  PrCurve curve;
  std::vector<CalibrationBin> calibration;
};

struct ClassReport {
  std::size_t num_frames = 0;
  std::size_t num_labels = 0;
  std::size_t num_detections = 0;  // after DontCare suppression and the confidence cut
  std::map<std::string, FilterReport> filters;
};

// Everything needed to re-run the command that produced a report.
struct RunManifest {
  std::string command_line;
  std::string tool_version;
  DatasetFingerprint dataset;
  double wall_time_seconds = 0.0;
};

struct EvalReport {
  EvalConfig config;
  std::map<std::string, ClassReport> classes;
  // Set when Brier/calibration were refused because scores are not
  // probabilities and no score transform was configured.
  std::optional<std::string> calibration_refused;
  RunManifest manifest;
};

// Classes to evaluate: config.classes if set, else every class (after
// collapse) among labels and detections, DontCare excluded, sorted.
std::vector<std::string> evaluation_classes(std::span<const FramePair> frames,
                                            const EvalConfig& config);

// Copies of `frames` restricted to `class_name`, with DontCare suppression
// applied per the config. Class collapse must already have happened.
std::vector<FramePair> frames_for_class(std::span<const FramePair> frames,
                                        const std::string& class_name, const EvalConfig& config);

// Applies class collapse and the score transform in place.
void normalize_frames(std::vector<FramePair>& frames, const EvalConfig& config);

// Full evaluation. Per-frame work runs on up to `threads` workers; the
// report is identical for every thread count. Throws InvalidArgument for
// invalid configurations or scores.
EvalReport evaluate(std::vector<FramePair> frames, const EvalConfig& config,
                    std::size_t threads = 1);

}  // namespace deteval
