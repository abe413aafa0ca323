// Independent reference computations. None of these call into the library
// code they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "deteval/geometry.h"

namespace deteval::oracle {

// IoU by counting grid cell centres covered by each box.
inline double raster_iou(const Box2D& a, const Box2D& b, double cell) {
  const double x0 = std::min(a.left(), b.left());
  const double y0 = std::min(a.top(), b.top());
  const double x1 = std::max(a.right(), b.right());
  const double y1 = std::max(a.bottom(), b.bottom());
  auto inside = [](const Box2D& r, double x, double y) {
    return x > r.left() && x < r.right() && y > r.top() && y < r.bottom();
  };
  long both = 0;
  long either = 0;
  for (double y = y0 + cell / 2; y < y1; y += cell) {
    for (double x = x0 + cell / 2; x < x1; x += cell) {
      const bool in_a = inside(a, x, y);
      const bool in_b = inside(b, x, y);
      both += in_a && in_b;
      either += in_a || in_b;
    }
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

// Interval-overlap IoU computed with plain min/max arithmetic.
inline double direct_iou(const Box2D& a, const Box2D& b) {
  const double w = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.left(), b.left()));
  const double h = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top()));
  const double inter = w * h;
  return inter / (a.area() + b.area() - inter);
}

struct BestMatching {
  std::size_t pairs = 0;
  double total_iou = 0.0;
};

// Most pairs, then highest IoU sum, over all permutations of the padded
// label index set.
inline BestMatching permutation_best(const std::vector<Box2D>& dets,
                                     const std::vector<Box2D>& labels, double tau) {
  const std::size_t n = std::max(dets.size(), labels.size());
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  BestMatching best;
  do {
    BestMatching cur;
    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (perm[d] >= labels.size()) continue;
      const double v = direct_iou(dets[d], labels[perm[d]]);
      if (v >= tau) {
        ++cur.pairs;
        cur.total_iou += v;
      }
    }
    if (cur.pairs > best.pairs || (cur.pairs == best.pairs && cur.total_iou > best.total_iou)) {
      best = cur;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

enum class ApRule { kAllPoints, kEleven, kFortyOne };

// AP from a ranked list of TP/FP flags against `num_labels` ground truths.
inline double ranked_ap(const std::vector<bool>& is_tp, std::size_t num_labels, ApRule rule) {
  std::vector<double> rec;
  std::vector<double> prec;
  double tp = 0;
  double fp = 0;
  for (bool t : is_tp) {
    (t ? tp : fp) += 1;
    rec.push_back(tp / static_cast<double>(num_labels));
    prec.push_back(tp / (tp + fp));
  }
  auto best_precision_from = [&](double r) {
    double p = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i] >= r - 1e-12) p = std::max(p, prec[i]);
    }
    return p;
  };
  if (rule == ApRule::kAllPoints) {
    double ap = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i] > prev) {
        ap += (rec[i] - prev) * best_precision_from(rec[i]);
        prev = rec[i];
      }
    }
    return ap;
  }
  const int steps = rule == ApRule::kEleven ? 10 : 40;
  double sum = 0.0;
  for (int k = 0; k <= steps; ++k) sum += best_precision_from(static_cast<double>(k) / steps);
  return sum / (steps + 1);
}

// Reading of a KITTI line by an independent rule set: whitespace split, a
// regular expression for numbers, and the same range rules as the devkit.
struct KittiReading {
  bool ok = false;
  std::size_t column = 0;  // first failing field, 0 for an arity error
  std::vector<std::string> tokens;
  std::vector<double> numbers;  // fields 2..N as doubles (when ok)
};

inline KittiReading read_kitti(const std::string& line, bool detection) {
  static const std::regex number_re(R"(-?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  static const std::regex integer_re(R"(-?\d+)");
  KittiReading r;
  std::istringstream in(line);
  for (std::string t; in >> t;) r.tokens.push_back(t);
  const std::size_t expected = detection ? 16 : 15;
  if (r.tokens.size() != expected) return r;

  const bool sentinels = detection || r.tokens[0] == "DontCare";
  auto fail = [&](std::size_t col) {
    r.column = col;
    return r;
  };
  auto number = [&](std::size_t col) -> std::optional<double> {
    const std::string& t = r.tokens[col - 1];
    if (!std::regex_match(t, number_re)) return std::nullopt;
    const double v = std::strtod(t.c_str(), nullptr);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  };

  r.numbers.assign(expected - 1, 0.0);
  const auto trunc = number(2);
  if (!trunc) return fail(2);
  if (!(*trunc == -1.0 && sentinels) && (*trunc < 0.0 || *trunc > 1.0)) return fail(2);
  r.numbers[0] = *trunc;

  const std::string& occ = r.tokens[2];
  if (!std::regex_match(occ, integer_re)) return fail(3);
  // strtoll saturates on overflow, which still lands outside the range.
  const long long o = std::strtoll(occ.c_str(), nullptr, 10);
  if (!(o == -1 && sentinels) && (o < 0 || o > 3)) return fail(3);
  r.numbers[1] = static_cast<double>(o);

  for (std::size_t col = 4; col <= 8; ++col) {
    const auto v = number(col);
    if (!v) return fail(col);
    r.numbers[col - 2] = *v;
  }
  if (r.tokens[0] != "DontCare") {
    if (!(r.numbers[3] < r.numbers[5])) return fail(7);
    if (!(r.numbers[4] < r.numbers[6])) return fail(8);
  }
  for (std::size_t col = 9; col <= expected; ++col) {
    const auto v = number(col);
    if (!v) return fail(col);
    r.numbers[col - 2] = *v;
  }
  r.ok = true;
  return r;
}

}  // namespace deteval::oracle
