// Precision/recall curves, AP, Brier scores and calibration curves.
//
// Every function here treats all records in the given frames as one class;
// class selection, collapse, and DontCare handling happen before (see
// evaluate.h). Matchings are recomputed from scratch at each confidence
// threshold because optimal matchings are not nested under detection
// removal.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deteval/counts.h"
#include "deteval/filters.h"
#include "deteval/matching.h"
#include "deteval/records.h"

namespace deteval {

enum class ApMode { kAllPoints, kElevenPoint, kFortyOnePoint };
enum class BrierSupport { kLabels, kDetections, kUnion };
enum class ScoreTransform { kNone, kSigmoid, kMinMax };

std::string_view to_string(ApMode mode);
ApMode parse_ap_mode(std::string_view text);
std::string_view to_string(BrierSupport support);
BrierSupport parse_brier_support(std::string_view text);
std::string_view to_string(ScoreTransform transform);
ScoreTransform parse_score_transform(std::string_view text);

inline constexpr std::size_t kDefaultUniqueGridCap = 1001;

// Confidence thresholds swept by a curve.
//   unique-scores: every distinct score, capped at `count` by uniform
//                  subsampling of the sorted list.
//   fixed(N):      N evenly spaced thresholds from 1 down to 0.
struct ThresholdGrid {
  enum class Kind { kUniqueScores, kFixed };
  Kind kind = Kind::kUniqueScores;
  std::size_t count = kDefaultUniqueGridCap;

  static ThresholdGrid unique(std::size_t cap = kDefaultUniqueGridCap) {
    return {Kind::kUniqueScores, cap};
  }
  static ThresholdGrid fixed(std::size_t n) { return {Kind::kFixed, n}; }
  // "unique", "unique:CAP" or "fixed:N".
  static ThresholdGrid parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const ThresholdGrid&, const ThresholdGrid&) = default;
};

struct DontCarePolicy {
  bool enabled = true;
  double overlap_threshold = 0.5;

  friend bool operator==(const DontCarePolicy&, const DontCarePolicy&) = default;
};

struct NamedFilter {
  std::string name;
  FilterSpec spec;

  friend bool operator==(const NamedFilter&, const NamedFilter&) = default;
};

struct EvalConfig {
  double tau = 0.7;
  MatcherKind matcher = MatcherKind::kOptimal;
  double min_confidence = 0.0;
  ThresholdGrid grid;
  ApMode ap_mode = ApMode::kAllPoints;
  std::vector<BrierSupport> brier_supports = {BrierSupport::kLabels, BrierSupport::kDetections,
                                              BrierSupport::kUnion};
  std::size_t calibration_bins = 10;
  std::map<std::string, std::string> class_collapse;
  DontCarePolicy dontcare;
  ScoreTransform score_transform = ScoreTransform::kNone;
  DifficultyThresholds difficulty;
  // Empty: every class present among the labels (DontCare excluded).
  std::vector<std::string> classes;
  // Always evaluated in addition to the unfiltered "all" view.
  std::vector<NamedFilter> filters;

  // Throws InvalidArgument on out-of-range values.
  void validate() const;
};

struct CurvePoint {
  double threshold = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 1.0;  // 1 when tp + fp == 0
  double recall = 1.0;     // 1 when tp + fn == 0
  double fp_per_frame = 0.0;
};

// Points are ordered by descending threshold. Recall is made non-decreasing
// by a running maximum; `recall_violations` counts the points where the raw
// recall dropped (possible only with non-optimal matchers or filters).
struct PrCurve {
  std::vector<CurvePoint> points;
  std::size_t recall_violations = 0;
};

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  double center = 0.0;
  std::size_t count = 0;
  std::optional<double> mean_confidence;      // absent when count == 0
  std::optional<double> empirical_precision;  // absent when count == 0
};

// Outcome of one detection or label at a fixed confidence cut.
struct OutcomeSample {
  enum class Kind { kTruePositive, kFalsePositive, kFalseNegative };
  Kind kind = Kind::kFalseNegative;
  double confidence = 0.0;  // unused for false negatives
};

// Descending thresholds for `frames` (scores below min_confidence ignored).
// Never empty: with no usable scores it is {min_confidence}.
std::vector<double> threshold_grid(std::span<const FramePair> frames, const EvalConfig& config);

// Per-frame work shared by the curve, Brier and calibration routines.
struct FrameSweep {
  // counts[filter][threshold index]
  std::vector<std::vector<ConfusionCounts>> counts;
  // samples[filter] at the min_confidence cut
  std::vector<std::vector<OutcomeSample>> samples;
};

// Matches `frame` at each threshold of `grid` (detections with score >=
// max(threshold, min_confidence)) and at the min_confidence cut, then applies
// each filter to the resulting pair sets. Matchings are memoised by the kept
// detection count since the kept set is always a score-sorted prefix.
FrameSweep sweep_frame(const FramePair& frame, const EvalConfig& config,
                       std::span<const double> grid, std::span<const FilterSpec> filters);

// Builds curve points from summed counts.
PrCurve curve_from_counts(std::span<const double> grid,
                          std::span<const ConfusionCounts> summed, std::size_t num_frames);

// Throws InvalidArgument on non-finite scores, or on scores outside [0, 1]
// with a fixed grid.
PrCurve pr_curve(std::span<const FramePair> frames, const EvalConfig& config,
                 const FilterSpec& filter = {});

// Points with no detections (tp + fp == 0) carry no ranking information and
// are skipped. Throws InvalidArgument if recall decreases along the curve.
double average_precision(std::span<const CurvePoint> curve, ApMode mode);

// Squared-error mean over the support; nullopt when the support is empty.
std::optional<double> brier_from_samples(std::span<const OutcomeSample> samples,
                                         BrierSupport support);

// Per-sample Brier score at the min_confidence cut. Throws InvalidArgument
// if any considered score lies outside [0, 1].
std::optional<double> brier_score(std::span<const FramePair> frames, const EvalConfig& config,
                                  BrierSupport support, const FilterSpec& filter = {});

std::vector<CalibrationBin> calibration_from_samples(std::span<const OutcomeSample> samples,
                                                     std::size_t bins);

// Equal-width reliability bins over [0, 1]. Throws InvalidArgument if any
// considered score lies outside [0, 1].
std::vector<CalibrationBin> calibration_curve(std::span<const FramePair> frames,
                                              const EvalConfig& config,
                                              const FilterSpec& filter = {});

// Count-weighted l2 distance between the reliability curve and the
// diagonal: sqrt(sum_b n_b (conf_b - precision_b)^2 / sum_b n_b).
// nullopt when all bins are empty.
std::optional<double> calibration_l2_distance(std::span<const CalibrationBin> bins);

// Throws InvalidArgument unless every considered score is in [0, 1].
void require_probability_scores(std::span<const FramePair> frames, double min_confidence);

// Maps scores to [0, 1]: logistic, or min-max over the whole dataset
// (all ones when every score is equal). kNone leaves scores untouched.
void apply_score_transform(std::span<FramePair> frames, ScoreTransform transform);

}  // namespace deteval
