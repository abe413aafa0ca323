#include "deteval/metrics.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>

#include "deteval/numeric_text.h"

namespace deteval {

std::string_view to_string(ApMode mode) {
  switch (mode) {
    case ApMode::kAllPoints: return "all-points";
    case ApMode::kElevenPoint: return "eleven-point";
    case ApMode::kFortyOnePoint: return "forty-one-point";
  }
  return "?";
}

ApMode parse_ap_mode(std::string_view text) {
  if (text == "all-points") return ApMode::kAllPoints;
  if (text == "eleven-point" || text == "11") return ApMode::kElevenPoint;
  if (text == "forty-one-point" || text == "41") return ApMode::kFortyOnePoint;
  throw InvalidArgument("unknown AP mode '" + std::string(text) +
                        "' (expected all-points, eleven-point or forty-one-point)");
}

std::string_view to_string(BrierSupport support) {
  switch (support) {
    case BrierSupport::kLabels: return "labels";
    case BrierSupport::kDetections: return "detections";
    case BrierSupport::kUnion: return "union";
  }
  return "?";
}

BrierSupport parse_brier_support(std::string_view text) {
  if (text == "labels") return BrierSupport::kLabels;
  if (text == "detections") return BrierSupport::kDetections;
  if (text == "union" || text == "all") return BrierSupport::kUnion;
  throw InvalidArgument("unknown Brier support '" + std::string(text) +
                        "' (expected labels, detections or union)");
}

std::string_view to_string(ScoreTransform transform) {
  switch (transform) {
    case ScoreTransform::kNone: return "none";
    case ScoreTransform::kSigmoid: return "sigmoid";
    case ScoreTransform::kMinMax: return "minmax";
  }
  return "?";
}

ScoreTransform parse_score_transform(std::string_view text) {
  if (text == "none") return ScoreTransform::kNone;
  if (text == "sigmoid") return ScoreTransform::kSigmoid;
  if (text == "minmax") return ScoreTransform::kMinMax;
  throw InvalidArgument("unknown score transform '" + std::string(text) +
                        "' (expected none, sigmoid or minmax)");
}

ThresholdGrid ThresholdGrid::parse(std::string_view text) {
  auto count_after_colon = [&](std::string_view prefix) -> std::size_t {
    const std::optional<int> n = parse_int(text.substr(prefix.size()));
    if (!n || *n < 1) {
      throw InvalidArgument("bad threshold grid '" + std::string(text) + "'");
    }
    return static_cast<std::size_t>(*n);
  };
  if (text == "unique") return unique();
  if (text.starts_with("unique:")) return unique(count_after_colon("unique:"));
  if (text.starts_with("fixed:")) {
    const std::size_t n = count_after_colon("fixed:");
    if (n < 2) throw InvalidArgument("fixed grid needs at least 2 thresholds");
    return fixed(n);
  }
  throw InvalidArgument("bad threshold grid '" + std::string(text) +
                        "' (expected unique, unique:CAP or fixed:N)");
}

std::string ThresholdGrid::to_string() const {
  if (kind == Kind::kFixed) return "fixed:" + std::to_string(count);
  if (count == kDefaultUniqueGridCap) return "unique";
  return "unique:" + std::to_string(count);
}

void EvalConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("IoU threshold must lie in (0, 1]");
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw InvalidArgument("minimum confidence must lie in [0, 1]");
  }
  if (calibration_bins < 2) throw InvalidArgument("calibration needs at least 2 bins");
  if (grid.count < 1 || (grid.kind == ThresholdGrid::Kind::kFixed && grid.count < 2)) {
    throw InvalidArgument("threshold grid is empty");
  }
  if (dontcare.enabled &&
      !(dontcare.overlap_threshold > 0.0 && dontcare.overlap_threshold <= 1.0)) {
    throw InvalidArgument("DontCare overlap threshold must lie in (0, 1]");
  }
  for (const NamedFilter& f : filters) {
    if (f.name.empty() || f.name == "all") {
      throw InvalidArgument("filter names must be non-empty and not 'all'");
    }
  }
}

namespace {

void require_finite_scores(std::span<const FramePair> frames) {
  for (const FramePair& f : frames) {
    for (const DetectionRecord& d : f.detections) {
      if (!std::isfinite(d.score)) {
        throw InvalidArgument("frame " + f.frame_id + " has a non-finite detection score");
      }
    }
  }
}

}  // namespace

void require_probability_scores(std::span<const FramePair> frames, double min_confidence) {
  for (const FramePair& f : frames) {
    for (const DetectionRecord& d : f.detections) {
      if (!(d.score >= min_confidence)) continue;
      if (!(d.score <= 1.0)) {
        throw InvalidArgument("frame " + f.frame_id + " has score " + format_shortest(d.score) +
                              " outside [0, 1]; Brier and calibration need probabilities "
                              "(use a sigmoid or minmax score transform)");
      }
    }
  }
}

std::vector<double> threshold_grid(std::span<const FramePair> frames, const EvalConfig& config) {
  std::vector<double> grid;
  if (config.grid.kind == ThresholdGrid::Kind::kFixed) {
    const std::size_t n = config.grid.count;
    for (std::size_t k = 0; k < n; ++k) {
      grid.push_back(1.0 - static_cast<double>(k) / static_cast<double>(n - 1));
    }
    grid.back() = 0.0;
    return grid;
  }
  for (const FramePair& f : frames) {
    for (const DetectionRecord& d : f.detections) {
      if (d.score >= config.min_confidence) grid.push_back(d.score);
    }
  }
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) return {config.min_confidence};
  const std::size_t cap = config.grid.count;
  if (grid.size() > cap) {
    std::vector<double> sub;
    sub.reserve(cap);
    const double step = cap > 1 ? static_cast<double>(grid.size() - 1) / static_cast<double>(cap - 1)
                                : 0.0;
    for (std::size_t i = 0; i < cap; ++i) {
      const auto idx = cap > 1 ? static_cast<std::size_t>(std::llround(step * static_cast<double>(i)))
                               : grid.size() - 1;
      sub.push_back(grid[idx]);
    }
    grid = std::move(sub);
  }
  return grid;
}

FrameSweep sweep_frame(const FramePair& frame, const EvalConfig& config,
                       std::span<const double> grid, std::span<const FilterSpec> filters) {
  // Detections above the cut, highest score first (input order on ties).
  std::vector<DetectionRecord> sorted;
  for (const DetectionRecord& d : frame.detections) {
    if (d.score >= config.min_confidence) sorted.push_back(d);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const DetectionRecord& a, const DetectionRecord& b) { return a.score > b.score; });

  std::vector<Box2D> label_boxes;
  label_boxes.reserve(frame.labels.size());
  for (const LabelRecord& l : frame.labels) label_boxes.push_back(l.box());
  std::vector<ScoredBox> scored;
  scored.reserve(sorted.size());
  for (const DetectionRecord& d : sorted) scored.push_back({d.box(), d.score});

  auto kept_at = [&](double threshold) {
    const double cut = std::max(threshold, config.min_confidence);
    const auto it = std::find_if(sorted.begin(), sorted.end(),
                                 [&](const DetectionRecord& d) { return !(d.score >= cut); });
    return static_cast<std::size_t>(it - sorted.begin());
  };
  auto pair_set_for = [&](std::size_t kept) {
    const std::span<const ScoredBox> dets(scored.data(), kept);
    const Matching m = run_matcher(config.matcher, dets, label_boxes, config.tau);
    return build_pair_set(m, std::span<const DetectionRecord>(sorted.data(), kept), frame.labels,
                          config.tau);
  };

  FrameSweep sweep;
  sweep.counts.assign(filters.size(), std::vector<ConfusionCounts>(grid.size()));
  std::vector<std::ptrdiff_t> memo_slot(sorted.size() + 1, -1);
  std::vector<std::vector<ConfusionCounts>> memo;
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const std::size_t kept = kept_at(grid[t]);
    if (memo_slot[kept] < 0) {
      const PairSet pairs = pair_set_for(kept);
      std::vector<ConfusionCounts> per_filter;
      per_filter.reserve(filters.size());
      for (const FilterSpec& f : filters) per_filter.push_back(filtered_counts(pairs, f));
      memo_slot[kept] = static_cast<std::ptrdiff_t>(memo.size());
      memo.push_back(std::move(per_filter));
    }
    const auto& per_filter = memo[static_cast<std::size_t>(memo_slot[kept])];
    for (std::size_t f = 0; f < filters.size(); ++f) sweep.counts[f][t] = per_filter[f];
  }

  const PairSet at_cut = pair_set_for(sorted.size());
  sweep.samples.resize(filters.size());
  for (std::size_t f = 0; f < filters.size(); ++f) {
    const FilterSpec& filter = filters[f];
    auto& out = sweep.samples[f];
    for (const PairSet::FullPair& p : at_cut.full_pairs()) {
      if (filter.passes_detection(p.detection) && filter.passes_label(p.label)) {
        out.push_back({OutcomeSample::Kind::kTruePositive, p.detection.score});
      }
    }
    for (const DetectionRecord& d : at_cut.detection_singles()) {
      if (filter.passes_detection(d)) out.push_back({OutcomeSample::Kind::kFalsePositive, d.score});
    }
    for (const LabelRecord& l : at_cut.label_singles()) {
      if (filter.passes_label(l)) out.push_back({OutcomeSample::Kind::kFalseNegative, 0.0});
    }
  }
  return sweep;
}

PrCurve curve_from_counts(std::span<const double> grid, std::span<const ConfusionCounts> summed,
                          std::size_t num_frames) {
  PrCurve curve;
  curve.points.reserve(grid.size());
  double best_recall = 0.0;
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const ConfusionCounts& c = summed[t];
    CurvePoint p;
    p.threshold = grid[t];
    p.tp = c.tp;
    p.fp = c.fp;
    p.fn = c.fn;
    p.precision = c.tp + c.fp == 0
                      ? 1.0
                      : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    double recall = c.tp + c.fn == 0
                        ? 1.0
                        : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (t > 0 && recall < best_recall) {
      ++curve.recall_violations;
      recall = best_recall;
    }
    best_recall = recall;
    p.recall = recall;
    p.fp_per_frame =
        num_frames == 0 ? 0.0 : static_cast<double>(c.fp) / static_cast<double>(num_frames);
    curve.points.push_back(p);
  }
  return curve;
}

PrCurve pr_curve(std::span<const FramePair> frames, const EvalConfig& config,
                 const FilterSpec& filter) {
  config.validate();
  require_finite_scores(frames);
  if (config.grid.kind == ThresholdGrid::Kind::kFixed) {
    for (const FramePair& f : frames) {
      for (const DetectionRecord& d : f.detections) {
        if (d.score < 0.0 || d.score > 1.0) {
          throw InvalidArgument("a fixed threshold grid needs scores in [0, 1]; frame " +
                                f.frame_id + " has " + format_shortest(d.score));
        }
      }
    }
  }
  const std::vector<double> grid = threshold_grid(frames, config);
  const FilterSpec filters[] = {filter};
  std::vector<ConfusionCounts> summed(grid.size());
  for (const FramePair& frame : frames) {
    const FrameSweep sweep = sweep_frame(frame, config, grid, filters);
    for (std::size_t t = 0; t < grid.size(); ++t) summed[t] += sweep.counts[0][t];
  }
  return curve_from_counts(grid, summed, frames.size());
}

namespace {

double interpolated_ap(std::span<const CurvePoint> pts, std::size_t samples) {
  double total = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(samples - 1);
    double best = 0.0;
    for (const CurvePoint& p : pts) {
      if (p.recall >= r) best = std::max(best, p.precision);
    }
    total += best;
  }
  return total / static_cast<double>(samples);
}

}  // namespace

double average_precision(std::span<const CurvePoint> curve, ApMode mode) {
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].recall < curve[i - 1].recall) {
      throw InvalidArgument("curve recall must be non-decreasing");
    }
  }
  std::vector<CurvePoint> pts;
  std::copy_if(curve.begin(), curve.end(), std::back_inserter(pts),
               [](const CurvePoint& p) { return p.tp + p.fp > 0; });
  if (pts.empty()) return 0.0;

  switch (mode) {
    case ApMode::kElevenPoint: return interpolated_ap(pts, 11);
    case ApMode::kFortyOnePoint: return interpolated_ap(pts, 41);
    case ApMode::kAllPoints: break;
  }
  // Precision envelope from the right, integrated over recall steps.
  std::vector<double> recall{0.0};
  std::vector<double> precision{0.0};
  for (const CurvePoint& p : pts) {
    recall.push_back(p.recall);
    precision.push_back(p.precision);
  }
  recall.push_back(1.0);
  precision.push_back(0.0);
  for (std::size_t i = precision.size() - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  for (std::size_t i = 1; i < recall.size(); ++i) {
    ap += (recall[i] - recall[i - 1]) * precision[i];
  }
  return std::clamp(ap, 0.0, 1.0);
}

std::optional<double> brier_from_samples(std::span<const OutcomeSample> samples,
                                         BrierSupport support) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const OutcomeSample& s : samples) {
    const double c = s.confidence;
    switch (s.kind) {
      case OutcomeSample::Kind::kTruePositive:
        sum += (1.0 - c) * (1.0 - c);
        ++n;
        break;
      case OutcomeSample::Kind::kFalsePositive:
        if (support == BrierSupport::kLabels) break;
        sum += c * c;
        ++n;
        break;
      case OutcomeSample::Kind::kFalseNegative:
        if (support == BrierSupport::kDetections) break;
        sum += 1.0;
        ++n;
        break;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

namespace {

std::vector<OutcomeSample> gather_samples(std::span<const FramePair> frames,
                                          const EvalConfig& config, const FilterSpec& filter) {
  config.validate();
  require_finite_scores(frames);
  require_probability_scores(frames, config.min_confidence);
  const FilterSpec filters[] = {filter};
  std::vector<OutcomeSample> all;
  for (const FramePair& frame : frames) {
    FrameSweep sweep = sweep_frame(frame, config, {}, filters);
    all.insert(all.end(), sweep.samples[0].begin(), sweep.samples[0].end());
  }
  return all;
}

}  // namespace

std::optional<double> brier_score(std::span<const FramePair> frames, const EvalConfig& config,
                                  BrierSupport support, const FilterSpec& filter) {
  return brier_from_samples(gather_samples(frames, config, filter), support);
}

std::vector<CalibrationBin> calibration_from_samples(std::span<const OutcomeSample> samples,
                                                     std::size_t bins) {
  if (bins < 2) throw InvalidArgument("calibration needs at least 2 bins");
  std::vector<CalibrationBin> out(bins);
  std::vector<double> conf_sum(bins, 0.0);
  std::vector<std::size_t> tp(bins, 0);
  const double width = 1.0 / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lower = static_cast<double>(b) * width;
    out[b].upper = static_cast<double>(b + 1) * width;
    out[b].center = (static_cast<double>(b) + 0.5) * width;
  }
  out.back().upper = 1.0;
  for (const OutcomeSample& s : samples) {
    if (s.kind == OutcomeSample::Kind::kFalseNegative) continue;
    const auto b = std::min(bins - 1, static_cast<std::size_t>(s.confidence * static_cast<double>(bins)));
    ++out[b].count;
    conf_sum[b] += s.confidence;
    if (s.kind == OutcomeSample::Kind::kTruePositive) ++tp[b];
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (out[b].count == 0) continue;
    const auto n = static_cast<double>(out[b].count);
    out[b].mean_confidence = conf_sum[b] / n;
    out[b].empirical_precision = static_cast<double>(tp[b]) / n;
  }
  return out;
}

std::vector<CalibrationBin> calibration_curve(std::span<const FramePair> frames,
                                              const EvalConfig& config, const FilterSpec& filter) {
  return calibration_from_samples(gather_samples(frames, config, filter), config.calibration_bins);
}

std::optional<double> calibration_l2_distance(std::span<const CalibrationBin> bins) {
  double weighted = 0.0;
  std::size_t total = 0;
  for (const CalibrationBin& b : bins) {
    if (b.count == 0) continue;
    const double gap = *b.mean_confidence - *b.empirical_precision;
    weighted += static_cast<double>(b.count) * gap * gap;
    total += b.count;
  }
  if (total == 0) return std::nullopt;
  return std::sqrt(weighted / static_cast<double>(total));
}

void apply_score_transform(std::span<FramePair> frames, ScoreTransform transform) {
  if (transform == ScoreTransform::kNone) return;
  if (transform == ScoreTransform::kSigmoid) {
    for (FramePair& f : frames) {
      for (DetectionRecord& d : f.detections) d.score = 1.0 / (1.0 + std::exp(-d.score));
    }
    return;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const FramePair& f : frames) {
    for (const DetectionRecord& d : f.detections) {
      lo = std::min(lo, d.score);
      hi = std::max(hi, d.score);
    }
  }
  for (FramePair& f : frames) {
    for (DetectionRecord& d : f.detections) {
      d.score = hi > lo ? (d.score - lo) / (hi - lo) : 1.0;
    }
  }
}

}  // namespace deteval
