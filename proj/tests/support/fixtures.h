// Hand-built scenarios shared by the unit and acceptance suites.
#pragma once

#include <string>
#include <vector>

#include "deteval/geometry.h"
#include "deteval/matching.h"
#include "deteval/records.h"

namespace deteval::fixtures {

// Two overlapping labels and two detections. IoUs: d0-l0 0.56, d0-l1 0.72,
// d1-l1 0.56, d1-l0 0.09375. d0 has the higher confidence, so a greedy pass
// lets it take l1 and strands both d1 and l0.
inline constexpr double kCrossingTau = 0.5;

inline std::vector<Box2D> crossing_labels() { return {Box2D(0, 0, 20, 10), Box2D(7, 0, 31, 10)}; }

inline std::vector<ScoredBox> crossing_detections() {
  return {{Box2D(6, 0, 25, 10), 0.9}, {Box2D(17, 0, 32, 10), 0.8}};
}

inline std::vector<Box2D> crossing_detection_boxes() {
  std::vector<Box2D> out;
  for (const ScoredBox& d : crossing_detections()) out.push_back(d.box);
  return out;
}

// 3x3 case at tau 0.5 where raw IoU weights favour two strong pairs over a
// perfect matching of three weaker ones. Intervals on the x axis, shared y
// extent. Above-threshold IoUs:
//   d0-l0 5/8, d1-l0 8/9, d1-l1 1/2, d2-l1 18/19, d2-l2 10/19.
inline constexpr double kScalingTau = 0.5;

inline std::vector<Box2D> scaling_detections() {
  return {Box2D(11, 0, 16, 1), Box2D(7, 0, 16, 1), Box2D(0, 0, 19, 1)};
}

inline std::vector<Box2D> scaling_labels() {
  return {Box2D(8, 0, 16, 1), Box2D(1, 0, 19, 1), Box2D(2, 0, 12, 1)};
}

// One detection between two labels of widths 0.6 and 0.9. The detection's
// best label (IoU 6/7) is the narrow one; the wide one is still above tau
// (IoU 7/9). Filter: keep labels of width >= 0.65.
inline constexpr double kWidthTrapTau = 0.7;
inline constexpr const char* kWidthTrapFilter = "label.width >= 0.65";

inline std::vector<DetectionRecord> width_trap_detections() {
  return {make_detection(Box2D(0, 0, 0.7, 1), 0.9)};
}

inline std::vector<LabelRecord> width_trap_labels() {
  return {make_label(Box2D(0, 0, 0.6, 1)), make_label(Box2D(0, 0, 0.9, 1))};
}

// A label just under an area bound matched by a detection just over it.
// Striking the label and re-matching turns the detection into an FP that
// the unfiltered evaluation does not have.
inline constexpr double kWitnessTau = 0.7;
inline constexpr const char* kWitnessFilter = "both.area >= 1600";

inline std::vector<DetectionRecord> witness_detections() {
  return {make_detection(Box2D(0, 0, 41, 40), 0.8)};
}

inline std::vector<LabelRecord> witness_labels() { return {make_label(Box2D(0, 0, 39, 40))}; }

// Model A: one TP at 0.9. Model B: the same TP plus an FP at 0.01 far away.
inline FramePair brier_model_a() {
  return {"000000", {make_label(Box2D(0, 0, 10, 10))}, {make_detection(Box2D(0, 0, 10, 10), 0.9)}};
}

inline FramePair brier_model_b() {
  FramePair f = brier_model_a();
  f.detections.push_back(make_detection(Box2D(100, 100, 110, 110), 0.01));
  return f;
}

// Ten detections in one frame, six labels, every detection either exactly
// on a label (TP) or far from all labels (FP). By descending confidence the
// outcomes are T F T T F T F F T F; the sixth label is never found.
struct RankedFixture {
  FramePair frame;
  std::vector<double> confidences;  // descending
  std::vector<bool> is_tp;          // aligned with confidences
  std::size_t num_labels = 0;
};

inline RankedFixture ten_detection_fixture() {
  RankedFixture f;
  f.confidences = {0.95, 0.92, 0.85, 0.75, 0.72, 0.55, 0.45, 0.35, 0.25, 0.05};
  f.is_tp = {true, false, true, true, false, true, false, false, true, false};
  f.num_labels = 6;
  f.frame.frame_id = "000000";
  for (std::size_t i = 0; i < f.num_labels; ++i) {
    const double x = 100.0 * static_cast<double>(i);
    f.frame.labels.push_back(make_label(Box2D(x, 0, x + 50, 50)));
  }
  std::size_t next_label = 0;
  for (std::size_t i = 0; i < f.confidences.size(); ++i) {
    if (f.is_tp[i]) {
      const double x = 100.0 * static_cast<double>(next_label++);
      f.frame.detections.push_back(make_detection(Box2D(x, 0, x + 50, 50), f.confidences[i]));
    } else {
      const double x = 100.0 * static_cast<double>(i);
      f.frame.detections.push_back(make_detection(Box2D(x, 500, x + 50, 550), f.confidences[i]));
    }
  }
  return f;
}

}  // namespace deteval::fixtures
