#include "deteval/scenario.h"

#include <algorithm>
#include <cmath>

namespace deteval {

std::uint64_t SplitRng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t SplitRng::between(std::size_t lo, std::size_t hi) {
  if (hi <= lo) return lo;
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::size_t>(next() % span);
}

void ScenarioParams::validate() const {
  if (min_detections > max_detections || min_labels > max_labels) {
    throw InvalidArgument("scenario count range has min > max");
  }
  if (!(frame_width > 0.0) || !(frame_height > 0.0)) {
    throw InvalidArgument("scenario frame size must be positive");
  }
  if (!(min_box_size > 0.0) || min_box_size > max_box_size ||
      max_box_size * 2.0 > frame_height || max_box_size * 1.4 > frame_width) {
    throw InvalidArgument("scenario box size range does not fit the frame");
  }
  if (!(overlap_bias >= 0.0 && overlap_bias <= 1.0)) {
    throw InvalidArgument("overlap bias must lie in [0, 1]");
  }
}

namespace {

// Keeps a box of the given size inside [x0, x1) x [y0, y1).
Box2D place(double cx, double cy, double w, double h, double x0, double y0,
            double x1, double y1) {
  const double left = std::clamp(cx - w / 2.0, x0, x1 - w);
  const double top = std::clamp(cy - h / 2.0, y0, y1 - h);
  return Box2D(left, top, left + w, top + h);
}

// Two decimals, like KITTI label files.
double quantize(double v) { return std::round(v * 100.0) / 100.0; }

Box2D quantized(const Box2D& b) {
  const double l = quantize(b.left());
  const double t = quantize(b.top());
  return Box2D(l, t, std::max(quantize(b.right()), l + 0.01),
               std::max(quantize(b.bottom()), t + 0.01));
}

}  // namespace

Scenario generate_scenario(std::uint64_t seed, const ScenarioParams& params) {
  params.validate();
  SplitRng rng(seed);
  const double width = params.frame_width;
  const double band = params.frame_height / 2.0;  // labels above, strays below
  auto size = [&] { return rng.uniform(params.min_box_size, params.max_box_size); };

  Scenario s;
  const std::size_t num_labels = rng.between(params.min_labels, params.max_labels);
  const std::size_t num_dets = rng.between(params.min_detections, params.max_detections);

  std::vector<Box2D> label_boxes;
  for (std::size_t i = 0; i < num_labels; ++i) {
    const double w = size();
    const double h = size() * 0.8;
    double cx = rng.uniform(0.0, width);
    double cy = rng.uniform(0.0, band);
    if (!label_boxes.empty() && rng.chance(params.overlap_bias)) {
      const Box2D& anchor = label_boxes[rng.between(0, label_boxes.size() - 1)];
      cx = (anchor.left() + anchor.right()) / 2.0 + rng.uniform(-0.5, 0.5) * anchor.width();
      cy = (anchor.top() + anchor.bottom()) / 2.0 + rng.uniform(-0.3, 0.3) * anchor.height();
    }
    label_boxes.push_back(quantized(place(cx, cy, w, h, 0.0, 0.0, width, band)));

    LabelRecord label = make_label(label_boxes.back());
    label.truncation = quantize(rng.uniform(0.0, 0.6));
    label.occlusion = static_cast<int>(rng.between(0, 2));
    label.location_xyz = {quantize(rng.uniform(-15.0, 15.0)), 1.6,
                          quantize(rng.uniform(4.0, 70.0))};
    s.labels.push_back(std::move(label));
  }

  for (std::size_t i = 0; i < num_dets; ++i) {
    Box2D box(0.0, band, 1.0, band + 1.0);
    if (!label_boxes.empty() && rng.chance(params.overlap_bias)) {
      const Box2D& target = label_boxes[rng.between(0, label_boxes.size() - 1)];
      const double jitter = rng.uniform(0.0, 0.35);
      const double w = target.width() * (1.0 + rng.uniform(-jitter, jitter));
      const double h = target.height() * (1.0 + rng.uniform(-jitter, jitter));
      const double cx = (target.left() + target.right()) / 2.0 +
                        rng.uniform(-jitter, jitter) * target.width();
      const double cy = (target.top() + target.bottom()) / 2.0 +
                        rng.uniform(-jitter, jitter) * target.height();
      box = place(cx, cy, w, h, 0.0, 0.0, width, params.frame_height);
    } else {
      const double w = size();
      const double h = size() * 0.8;
      box = place(rng.uniform(0.0, width), rng.uniform(band, 2.0 * band), w, h, 0.0,
                  band, width, params.frame_height);
    }
    const double score = std::round(rng.uniform(0.01, 1.0) * 1e4) / 1e4;
    DetectionRecord det = make_detection(quantized(box), score);
    det.object.location_xyz = {quantize(rng.uniform(-15.0, 15.0)), 1.6,
                               quantize(rng.uniform(4.0, 70.0))};
    s.detections.push_back(std::move(det));
  }
  return s;
}

std::vector<Box2D> Scenario::detection_boxes() const {
  std::vector<Box2D> out;
  out.reserve(detections.size());
  for (const DetectionRecord& d : detections) out.push_back(d.box());
  return out;
}

std::vector<ScoredBox> Scenario::scored_detections() const {
  std::vector<ScoredBox> out;
  out.reserve(detections.size());
  for (const DetectionRecord& d : detections) out.push_back({d.box(), d.score});
  return out;
}

std::vector<Box2D> Scenario::label_boxes() const {
  std::vector<Box2D> out;
  out.reserve(labels.size());
  for (const LabelRecord& l : labels) out.push_back(l.box());
  return out;
}

FramePair Scenario::to_frame(std::string frame_id) const {
  return FramePair{std::move(frame_id), labels, detections};
}

}  // namespace deteval
