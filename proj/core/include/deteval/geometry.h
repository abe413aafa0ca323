// Axis-aligned image-plane boxes and overlap measures.
#pragma once

#include <stdexcept>
#include <string>

namespace deteval {

// Thrown when a box or numeric argument violates a precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raw corner values as they appear in a data file. No validity guarantees.
struct BoxCorners {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  friend bool operator==(const BoxCorners&, const BoxCorners&) = default;
};

// Corner-encoded pixel rectangle with strictly positive area and finite
// coordinates. Coordinates are continuous; KITTI uses sub-pixel edges.
class Box2D {
 public:
  // Throws InvalidArgument unless left < right, top < bottom, all finite.
  Box2D(double left, double top, double right, double bottom);
  explicit Box2D(const BoxCorners& c) : Box2D(c.left, c.top, c.right, c.bottom) {}

  double left() const { return left_; }
  double top() const { return top_; }
  double right() const { return right_; }
  double bottom() const { return bottom_; }
  double width() const { return right_ - left_; }
  double height() const { return bottom_ - top_; }
  double area() const { return width() * height(); }
  BoxCorners corners() const { return {left_, top_, right_, bottom_}; }

  friend bool operator==(const Box2D&, const Box2D&) = default;

 private:
  double left_;
  double top_;
  double right_;
  double bottom_;
};

std::string to_string(const Box2D& box);

// Area of the intersection; 0 when the boxes are disjoint or only touch.
double intersection_area(const Box2D& a, const Box2D& b);

// Intersection over union, in [0, 1]. Symmetric.
double iou(const Box2D& a, const Box2D& b);

// Fraction of `a` covered by `region`: |a ∩ region| / |a|. Not symmetric.
double overlap_over_area(const Box2D& a, const Box2D& region);

// Expected depth error of a stereo rig at `depth_m`, propagated from a
// disparity error through z = b·f / D:  dz = z² / (b·f) · dD.
// depth, baseline and focal must be > 0; disparity error must be >= 0.
double expected_stereo_depth_error(double depth_m, double baseline_m,
                                   double focal_px, double disparity_error_px);

}  // namespace deteval
