#include "deteval/records.h"

namespace deteval {

LabelRecord make_label(const Box2D& box, std::string class_name) {
  LabelRecord r;
  r.class_name = std::move(class_name);
  r.truncation = 0.0;
  r.occlusion = 0;
  r.bbox = box.corners();
  return r;
}

DetectionRecord make_detection(const Box2D& box, double score, std::string class_name) {
  return DetectionRecord{make_label(box, std::move(class_name)), score};
}

}  // namespace deteval
