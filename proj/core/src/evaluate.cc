#include "deteval/evaluate.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "deteval/kitti.h"
#include "deteval/parallel.h"

#ifndef DETEVAL_VERSION_STRING
#define DETEVAL_VERSION_STRING "0.0.0"
#endif

namespace deteval {

std::string_view engine_version() { return DETEVAL_VERSION_STRING; }

std::vector<std::string> evaluation_classes(std::span<const FramePair> frames,
                                            const EvalConfig& config) {
  if (!config.classes.empty()) {
    std::set<std::string> unique(config.classes.begin(), config.classes.end());
    return {unique.begin(), unique.end()};
  }
  std::set<std::string> found;
  for (const FramePair& f : frames) {
    for (const LabelRecord& l : f.labels) {
      if (!l.is_dontcare()) found.insert(l.class_name);
    }
    for (const DetectionRecord& d : f.detections) {
      if (d.class_name() != kDontCareClass) found.insert(d.class_name());
    }
  }
  return {found.begin(), found.end()};
}

std::vector<FramePair> frames_for_class(std::span<const FramePair> frames,
                                        const std::string& class_name, const EvalConfig& config) {
  std::vector<FramePair> out;
  out.reserve(frames.size());
  for (const FramePair& f : frames) {
    FramePair g;
    g.frame_id = f.frame_id;
    std::vector<Box2D> dontcare;
    for (const LabelRecord& l : f.labels) {
      if (l.is_dontcare()) {
        if (l.bbox.left < l.bbox.right && l.bbox.top < l.bbox.bottom) dontcare.push_back(l.box());
      } else if (l.class_name == class_name) {
        g.labels.push_back(l);
      }
    }
    for (const DetectionRecord& d : f.detections) {
      if (d.class_name() == class_name) g.detections.push_back(d);
    }
    if (config.dontcare.enabled) {
      g.detections = suppress_dontcare(std::move(g.detections), dontcare,
                                       config.dontcare.overlap_threshold);
    }
    out.push_back(std::move(g));
  }
  return out;
}

void normalize_frames(std::vector<FramePair>& frames, const EvalConfig& config) {
  if (!config.class_collapse.empty()) {
    for (FramePair& f : frames) {
      apply_class_map(f.labels, config.class_collapse);
      apply_class_map(f.detections, config.class_collapse);
    }
  }
  apply_score_transform(frames, config.score_transform);
}

namespace {

bool scores_are_probabilities(std::span<const FramePair> frames, double min_confidence) {
  try {
    require_probability_scores(frames, min_confidence);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

ClassReport evaluate_class(std::span<const FramePair> frames, const EvalConfig& config,
                           std::span<const NamedFilter> filters, bool with_calibration,
                           std::size_t threads) {
  for (const FramePair& f : frames) {
    for (const DetectionRecord& d : f.detections) {
      if (!std::isfinite(d.score)) {
        throw InvalidArgument("frame " + f.frame_id + " has a non-finite detection score");
      }
      if (config.grid.kind == ThresholdGrid::Kind::kFixed && (d.score < 0.0 || d.score > 1.0)) {
        throw InvalidArgument("a fixed threshold grid needs scores in [0, 1]; frame " +
                              f.frame_id + " is out of range (use a score transform)");
      }
    }
  }

  const std::vector<double> grid = threshold_grid(frames, config);
  std::vector<FilterSpec> specs;
  for (const NamedFilter& f : filters) specs.push_back(f.spec);

  std::vector<FrameSweep> sweeps(frames.size());
  parallel_for(frames.size(), threads,
               [&](std::size_t i) { sweeps[i] = sweep_frame(frames[i], config, grid, specs); });

  ClassReport report;
  report.num_frames = frames.size();
  for (const FramePair& f : frames) {
    report.num_labels += f.labels.size();
    report.num_detections += static_cast<std::size_t>(
        std::count_if(f.detections.begin(), f.detections.end(),
                      [&](const DetectionRecord& d) { return d.score >= config.min_confidence; }));
  }

  for (std::size_t k = 0; k < filters.size(); ++k) {
    std::vector<ConfusionCounts> summed(grid.size());
    std::vector<OutcomeSample> samples;
    for (const FrameSweep& s : sweeps) {
      for (std::size_t t = 0; t < grid.size(); ++t) summed[t] += s.counts[k][t];
      samples.insert(samples.end(), s.samples[k].begin(), s.samples[k].end());
    }
    FilterReport fr;
    fr.expression = filters[k].spec.to_string();
    for (const OutcomeSample& s : samples) {
      switch (s.kind) {
        case OutcomeSample::Kind::kTruePositive: ++fr.counts.tp; break;
        case OutcomeSample::Kind::kFalsePositive: ++fr.counts.fp; break;
        case OutcomeSample::Kind::kFalseNegative: ++fr.counts.fn; break;
      }
    }
    fr.curve = curve_from_counts(grid, summed, frames.size());
    fr.ap = average_precision(fr.curve.points, config.ap_mode);
    for (BrierSupport support : config.brier_supports) {
      fr.brier[support] = with_calibration ? brier_from_samples(samples, support) : std::nullopt;
    }
    if (with_calibration) {
      fr.calibration = calibration_from_samples(samples, config.calibration_bins);
      fr.calibration_l2 = calibration_l2_distance(fr.calibration);
    }
    report.filters.emplace(filters[k].name, std::move(fr));
  }
  return report;
}

}  // namespace

EvalReport evaluate(std::vector<FramePair> frames, const EvalConfig& config, std::size_t threads) {
  config.validate();
  normalize_frames(frames, config);

  std::vector<NamedFilter> filters{{kUnfilteredName, FilterSpec{}}};
  std::set<std::string> names{kUnfilteredName};
  for (const NamedFilter& f : config.filters) {
    if (!names.insert(f.name).second) {
      throw InvalidArgument("duplicate filter name '" + f.name + "'");
    }
    filters.push_back(f);
  }

  EvalReport report;
  report.config = config;
  report.manifest.tool_version = std::string(engine_version());

  const bool probabilities = scores_are_probabilities(frames, config.min_confidence);
  if (!probabilities) {
    report.calibration_refused =
        "detection scores lie outside [0, 1]; Brier and calibration need probabilities "
        "(set a sigmoid or minmax score transform)";
  }

  for (const std::string& cls : evaluation_classes(frames, config)) {
    const std::vector<FramePair> class_frames = frames_for_class(frames, cls, config);
    report.classes.emplace(cls, evaluate_class(class_frames, config, filters, probabilities, threads));
  }
  return report;
}

}  // namespace deteval
