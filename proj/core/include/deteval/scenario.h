// Seeded synthetic frames for fuzzing and property tests.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "deteval/matching.h"
#include "deteval/records.h"

namespace deteval {

// Small deterministic generator. Output depends only on the seed, not on the
// standard library's distribution implementations.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi);
  bool chance(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

struct ScenarioParams {
  std::size_t min_detections = 0;
  std::size_t max_detections = 7;
  std::size_t min_labels = 0;
  std::size_t max_labels = 7;
  double frame_width = 1242.0;
  double frame_height = 375.0;
  double min_box_size = 20.0;
  double max_box_size = 120.0;
  // Probability that a label is placed next to an earlier label and that a
  // detection is a perturbed copy of some label. At 0 detections and labels
  // occupy disjoint halves of the frame.
  double overlap_bias = 0.5;

  void validate() const;
};

struct Scenario {
  std::vector<DetectionRecord> detections;
  std::vector<LabelRecord> labels;

  std::vector<Box2D> detection_boxes() const;
  std::vector<ScoredBox> scored_detections() const;
  std::vector<Box2D> label_boxes() const;
  FramePair to_frame(std::string frame_id) const;
};

Scenario generate_scenario(std::uint64_t seed, const ScenarioParams& params);

}  // namespace deteval
