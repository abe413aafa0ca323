#include "deteval/matching.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "deteval/assignment.h"

namespace deteval {
namespace {

void validate_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw InvalidArgument("IoU threshold must lie in (0, 1], got " + std::to_string(tau));
  }
}

void validate_table(const IouMatrix& ious) {
  if (ious.values.size() != ious.num_detections * ious.num_labels) {
    throw InvalidArgument("IoU table size does not match its dimensions");
  }
  for (double v : ious.values) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("IoU table value outside [0, 1]");
  }
}

Matching from_assignment(std::size_t num_detections, std::size_t num_labels,
                         std::span<const std::ptrdiff_t> det_to_label,
                         const auto& iou_of) {
  Matching m;
  std::vector<char> label_used(num_labels, 0);
  for (std::size_t d = 0; d < num_detections; ++d) {
    const std::ptrdiff_t l = det_to_label[d];
    if (l < 0) {
      m.unmatched_detections.push_back(d);
      continue;
    }
    const auto label = static_cast<std::size_t>(l);
    label_used[label] = 1;
    m.pairs.push_back({d, label, iou_of(d, label)});
  }
  for (std::size_t l = 0; l < num_labels; ++l) {
    if (!label_used[l]) m.unmatched_labels.push_back(l);
  }
  return m;
}

}  // namespace

double Matching::total_iou() const {
  double total = 0.0;
  for (const MatchedPair& p : pairs) total += p.iou;
  return total;
}

void check_matching(const Matching& m, std::size_t num_detections,
                    std::size_t num_labels, double tau) {
  std::vector<int> det_seen(num_detections, 0);
  std::vector<int> label_seen(num_labels, 0);
  auto mark = [](std::vector<int>& seen, std::size_t idx, const char* what) {
    if (idx >= seen.size()) {
      throw InvalidArgument(std::string(what) + " index out of range: " + std::to_string(idx));
    }
    if (seen[idx]++ != 0) {
      throw InvalidArgument(std::string(what) + " index used twice: " + std::to_string(idx));
    }
  };
  for (const MatchedPair& p : m.pairs) {
    mark(det_seen, p.detection, "detection");
    mark(label_seen, p.label, "label");
    if (p.iou < tau) {
      throw InvalidArgument("matched pair below IoU threshold: " + std::to_string(p.iou));
    }
  }
  for (std::size_t d : m.unmatched_detections) mark(det_seen, d, "detection");
  for (std::size_t l : m.unmatched_labels) mark(label_seen, l, "label");
  if (std::find(det_seen.begin(), det_seen.end(), 0) != det_seen.end()) {
    throw InvalidArgument("matching does not cover every detection");
  }
  if (std::find(label_seen.begin(), label_seen.end(), 0) != label_seen.end()) {
    throw InvalidArgument("matching does not cover every label");
  }
}

double ScaledAdjacency::scale(double iou_value, std::size_t n) {
  const double dim = static_cast<double>(n);
  return (iou_value + dim) / (2.0 * dim * dim);
}

IouMatrix iou_matrix(std::span<const Box2D> detections, std::span<const Box2D> labels) {
  IouMatrix m{detections.size(), labels.size(), {}};
  m.values.resize(detections.size() * labels.size());
  for (std::size_t d = 0; d < detections.size(); ++d) {
    for (std::size_t l = 0; l < labels.size(); ++l) {
      m.values[d * labels.size() + l] = iou(detections[d], labels[l]);
    }
  }
  return m;
}

ScaledAdjacency build_adjacency(std::span<const Box2D> detections,
                                std::span<const Box2D> labels, double tau) {
  validate_tau(tau);
  if (std::max(detections.size(), labels.size()) > kMaxAdjacencyDimension) {
    throw InvalidArgument("adjacency dimension " +
                          std::to_string(std::max(detections.size(), labels.size())) +
                          " exceeds the precision limit of " +
                          std::to_string(kMaxAdjacencyDimension));
  }
  return build_adjacency(iou_matrix(detections, labels), tau);
}

ScaledAdjacency build_adjacency(const IouMatrix& ious, double tau) {
  validate_tau(tau);
  validate_table(ious);
  const std::size_t n = std::max(ious.num_detections, ious.num_labels);
  if (n == 0) {
    throw InvalidArgument("adjacency needs at least one detection or label");
  }
  if (n > kMaxAdjacencyDimension) {
    throw InvalidArgument("adjacency dimension " + std::to_string(n) +
                          " exceeds the precision limit of " +
                          std::to_string(kMaxAdjacencyDimension));
  }
  ScaledAdjacency adj;
  adj.n_ = n;
  adj.tau_ = tau;
  adj.num_detections_ = ious.num_detections;
  adj.num_labels_ = ious.num_labels;
  adj.entries_.assign(n * n, 0.0);
  adj.raw_iou_.assign(n * n, 0.0);
  for (std::size_t d = 0; d < ious.num_detections; ++d) {
    for (std::size_t l = 0; l < ious.num_labels; ++l) {
      const double overlap = ious(d, l);
      adj.raw_iou_[d * n + l] = overlap;
      if (overlap >= tau) adj.entries_[d * n + l] = ScaledAdjacency::scale(overlap, n);
    }
  }
  return adj;
}

Matching optimal_match(const ScaledAdjacency& adjacency) {
  const std::size_t n = adjacency.dimension();
  WeightMatrix weights(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) weights(r, c) = adjacency.entry(r, c);
  }
  const std::vector<std::size_t> row_to_col = solve_max_weight_assignment(weights);

  std::vector<std::ptrdiff_t> det_to_label(adjacency.num_detections(), -1);
  for (std::size_t d = 0; d < adjacency.num_detections(); ++d) {
    const std::size_t l = row_to_col[d];
    if (l < adjacency.num_labels() && adjacency.entry(d, l) > 0.0) {
      det_to_label[d] = static_cast<std::ptrdiff_t>(l);
    }
  }
  return from_assignment(adjacency.num_detections(), adjacency.num_labels(), det_to_label,
                         [&](std::size_t d, std::size_t l) { return adjacency.raw_iou(d, l); });
}

Matching optimal_match(std::span<const Box2D> detections,
                       std::span<const Box2D> labels, double tau) {
  validate_tau(tau);
  if (detections.empty() || labels.empty()) {
    Matching m;
    m.unmatched_detections.resize(detections.size());
    std::iota(m.unmatched_detections.begin(), m.unmatched_detections.end(), 0);
    m.unmatched_labels.resize(labels.size());
    std::iota(m.unmatched_labels.begin(), m.unmatched_labels.end(), 0);
    return m;
  }
  return optimal_match(build_adjacency(detections, labels, tau));
}

Matching greedy_match(std::span<const ScoredBox> detections,
                      std::span<const Box2D> labels, double tau, GreedyOrder order) {
  validate_tau(tau);
  std::vector<std::size_t> visit(detections.size());
  std::iota(visit.begin(), visit.end(), 0);
  if (order == GreedyOrder::kConfidenceDescending) {
    std::stable_sort(visit.begin(), visit.end(), [&](std::size_t a, std::size_t b) {
      return detections[a].confidence > detections[b].confidence;
    });
  }

  std::vector<char> claimed(labels.size(), 0);
  std::vector<std::ptrdiff_t> det_to_label(detections.size(), -1);
  std::vector<double> det_iou(detections.size(), 0.0);
  for (std::size_t d : visit) {
    std::ptrdiff_t best = -1;
    double best_iou = -1.0;
    for (std::size_t l = 0; l < labels.size(); ++l) {
      if (claimed[l]) continue;
      const double overlap = iou(detections[d].box, labels[l]);
      if (overlap >= tau && overlap > best_iou) {
        best = static_cast<std::ptrdiff_t>(l);
        best_iou = overlap;
      }
    }
    if (best >= 0) {
      claimed[static_cast<std::size_t>(best)] = 1;
      det_to_label[d] = best;
      det_iou[d] = best_iou;
    }
  }
  return from_assignment(detections.size(), labels.size(), det_to_label,
                         [&](std::size_t d, std::size_t) { return det_iou[d]; });
}

namespace {

// Depth-first enumeration in lexicographic order (labels ascending, then
// "unmatched"), so the first optimum found has the smallest label sequence.
class BruteForceSearch {
 public:
  BruteForceSearch(std::size_t num_detections, std::size_t num_labels,
                   std::vector<double> ious, double tau)
      : num_detections_(num_detections),
        num_labels_(num_labels),
        ious_(std::move(ious)),
        tau_(tau),
        current_(num_detections, -1),
        best_(num_detections, -1),
        label_used_(num_labels, 0) {}

  std::vector<std::ptrdiff_t> run() {
    recurse(0, 0, 0.0L);
    return best_;
  }

 private:
  // Sums that differ by less than this are treated as tied.
  static constexpr long double kTieEpsilon = 1e-12L;

  void recurse(std::size_t det, std::size_t count, long double total) {
    if (det == num_detections_) {
      if (count > best_count_ ||
          (count == best_count_ && total > best_total_ + kTieEpsilon)) {
        best_count_ = count;
        best_total_ = total;
        best_ = current_;
      }
      return;
    }
    // Even matching every remaining detection cannot beat the incumbent.
    if (count + (num_detections_ - det) < best_count_) return;
    for (std::size_t l = 0; l < num_labels_; ++l) {
      const double overlap = ious_[det * num_labels_ + l];
      if (label_used_[l] || overlap < tau_) continue;
      label_used_[l] = 1;
      current_[det] = static_cast<std::ptrdiff_t>(l);
      recurse(det + 1, count + 1, total + overlap);
      label_used_[l] = 0;
    }
    current_[det] = -1;
    recurse(det + 1, count, total);
  }

  std::size_t num_detections_;
  std::size_t num_labels_;
  std::vector<double> ious_;
  double tau_;
  std::vector<std::ptrdiff_t> current_;
  std::vector<std::ptrdiff_t> best_;
  std::vector<char> label_used_;
  std::size_t best_count_ = 0;
  long double best_total_ = -1.0L;
};

}  // namespace

Matching brute_force_match(std::span<const Box2D> detections,
                           std::span<const Box2D> labels, double tau) {
  validate_tau(tau);
  if (std::max(detections.size(), labels.size()) > kMaxBruteForceDimension) {
    throw InvalidArgument("brute_force_match is limited to " +
                          std::to_string(kMaxBruteForceDimension) + " boxes per side");
  }
  return brute_force_match(iou_matrix(detections, labels), tau);
}

Matching brute_force_match(const IouMatrix& ious, double tau) {
  validate_tau(tau);
  validate_table(ious);
  if (std::max(ious.num_detections, ious.num_labels) > kMaxBruteForceDimension) {
    throw InvalidArgument("brute_force_match is limited to " +
                          std::to_string(kMaxBruteForceDimension) + " boxes per side");
  }
  BruteForceSearch search(ious.num_detections, ious.num_labels, ious.values, tau);
  const std::vector<std::ptrdiff_t> det_to_label = search.run();
  return from_assignment(ious.num_detections, ious.num_labels, det_to_label,
                         [&](std::size_t d, std::size_t l) { return ious(d, l); });
}

std::string_view to_string(MatcherKind kind) {
  switch (kind) {
    case MatcherKind::kOptimal: return "optimal";
    case MatcherKind::kGreedyConfidence: return "greedy-confidence";
    case MatcherKind::kBruteForce: return "brute-force";
  }
  return "unknown";
}

MatcherKind parse_matcher_kind(std::string_view text) {
  if (text == "optimal") return MatcherKind::kOptimal;
  if (text == "greedy" || text == "greedy-confidence") return MatcherKind::kGreedyConfidence;
  if (text == "brute-force") return MatcherKind::kBruteForce;
  throw InvalidArgument("unknown matcher '" + std::string(text) +
                        "' (expected optimal, greedy-confidence or brute-force)");
}

Matching run_matcher(MatcherKind kind, std::span<const ScoredBox> detections,
                     std::span<const Box2D> labels, double tau) {
  switch (kind) {
    case MatcherKind::kGreedyConfidence:
      return greedy_match(detections, labels, tau, GreedyOrder::kConfidenceDescending);
    case MatcherKind::kOptimal:
    case MatcherKind::kBruteForce: {
      std::vector<Box2D> boxes;
      boxes.reserve(detections.size());
      for (const ScoredBox& d : detections) boxes.push_back(d.box);
      return kind == MatcherKind::kOptimal ? optimal_match(boxes, labels, tau)
                                           : brute_force_match(boxes, labels, tau);
    }
  }
  throw InvalidArgument("unknown matcher kind");
}

}  // namespace deteval
