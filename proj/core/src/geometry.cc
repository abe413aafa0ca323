#include "deteval/geometry.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace deteval {

Box2D::Box2D(double left, double top, double right, double bottom)
    : left_(left), top_(top), right_(right), bottom_(bottom) {
  if (!std::isfinite(left) || !std::isfinite(top) || !std::isfinite(right) ||
      !std::isfinite(bottom)) {
    throw InvalidArgument("box has non-finite coordinate");
  }
  if (!(left < right) || !(top < bottom)) {
    throw InvalidArgument("box has non-positive area: " + to_string(*this));
  }
}

std::string to_string(const Box2D& box) {
  std::ostringstream os;
  os << '[' << box.left() << ", " << box.top() << ", " << box.right() << ", "
     << box.bottom() << ']';
  return os.str();
}

double intersection_area(const Box2D& a, const Box2D& b) {
  const double w = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const Box2D& a, const Box2D& b) {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  // inter <= min(area) so the ratio is already in (0, 1]; clamp rounding.
  return std::min(1.0, inter / uni);
}

double overlap_over_area(const Box2D& a, const Box2D& region) {
  return std::min(1.0, intersection_area(a, region) / a.area());
}

double expected_stereo_depth_error(double depth_m, double baseline_m,
                                   double focal_px, double disparity_error_px) {
  if (!(depth_m > 0.0) || !(baseline_m > 0.0) || !(focal_px > 0.0)) {
    throw InvalidArgument("depth, baseline and focal length must be positive");
  }
  if (!(disparity_error_px >= 0.0) || !std::isfinite(disparity_error_px)) {
    throw InvalidArgument("disparity error must be finite and non-negative");
  }
  return depth_m * depth_m * disparity_error_px / (baseline_m * focal_px);
}

}  // namespace deteval
