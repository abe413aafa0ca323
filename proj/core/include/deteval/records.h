// Object records shared by ingest, filtering, and evaluation.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deteval/geometry.h"

namespace deteval {

inline constexpr const char* kDontCareClass = "DontCare";

// One ground-truth object in KITTI devkit field order. Unknown truncation
// and occlusion (the -1 sentinel) are held as std::nullopt.
struct LabelRecord {
  std::string class_name;
  std::optional<double> truncation;
  std::optional<int> occlusion;
  double alpha = 0.0;
  BoxCorners bbox;
  std::array<double, 3> dimensions_hwl{};
  std::array<double, 3> location_xyz{};
  double rotation_y = 0.0;
  // Extra numeric attributes addressable by custom filter keys. Not part of
  // the KITTI text format.
  std::map<std::string, double> extra;

  bool is_dontcare() const { return class_name == kDontCareClass; }
  // Validated box. Throws InvalidArgument for degenerate corners, which the
  // parser only admits on DontCare records.
  Box2D box() const { return Box2D(bbox); }

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

// A detection: every label field plus a ranking score.
struct DetectionRecord {
  LabelRecord object;
  double score = 0.0;

  Box2D box() const { return object.box(); }
  const std::string& class_name() const { return object.class_name; }

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

// Labels and detections sharing one frame id.
struct FramePair {
  std::string frame_id;
  std::vector<LabelRecord> labels;
  std::vector<DetectionRecord> detections;
};

// Convenience constructors for synthetic data.
LabelRecord make_label(const Box2D& box, std::string class_name = "Car");
DetectionRecord make_detection(const Box2D& box, double score,
                               std::string class_name = "Car");

}  // namespace deteval
