// Detection-to-label association.
//
// The optimal matcher solves a maximum-weight assignment over a scaled,
// thresholded IoU matrix. With n = max(#detections, #labels) every
// candidate pair with IoU >= tau gets weight (IoU + n) / (2 n²), which lies
// in [1/(2n), 1/(2n) + 1/(2n²)]. Any k such weights outsum any k-1 of them,
// so the maximum-weight assignment first maximises the number of matched
// pairs and then, among those, the total IoU. Missing rows or columns of a
// non-square problem are completed with zeros.
#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "deteval/geometry.h"

namespace deteval {

inline constexpr std::size_t kMaxAdjacencyDimension = 10'000;
inline constexpr std::size_t kMaxBruteForceDimension = 8;

struct MatchedPair {
  std::size_t detection = 0;
  std::size_t label = 0;
  double iou = 0.0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

// Injective pairing plus the unmatched residue on both sides. Pairs are
// sorted by detection index; residue lists are ascending.
struct Matching {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> unmatched_detections;
  std::vector<std::size_t> unmatched_labels;

  double total_iou() const;

  friend bool operator==(const Matching&, const Matching&) = default;
};

// Throws InvalidArgument unless `m` is injective, every pair has iou >= tau,
// and pairs plus residue partition [0, num_detections) and [0, num_labels).
void check_matching(const Matching& m, std::size_t num_detections,
                    std::size_t num_labels, double tau);

// Rectangular IoU table, rows are detections. Values must lie in [0, 1].
struct IouMatrix {
  std::size_t num_detections = 0;
  std::size_t num_labels = 0;
  std::vector<double> values;  // row-major

  double operator()(std::size_t det, std::size_t label) const {
    return values[det * num_labels + label];
  }
};

IouMatrix iou_matrix(std::span<const Box2D> detections, std::span<const Box2D> labels);

// Zero-completed square matrix of scaled, thresholded IoU. Rows index
// detections, columns index labels.
class ScaledAdjacency {
 public:
  std::size_t dimension() const { return n_; }
  double tau() const { return tau_; }
  std::size_t num_detections() const { return num_detections_; }
  std::size_t num_labels() const { return num_labels_; }

  double entry(std::size_t det, std::size_t label) const { return entries_[det * n_ + label]; }
  // Unthresholded IoU; zero in the completion rows and columns.
  double raw_iou(std::size_t det, std::size_t label) const { return raw_iou_[det * n_ + label]; }

  // Scaled weight for an IoU at or above tau in an n-dimensional problem.
  static double scale(double iou, std::size_t n);

 private:
  friend ScaledAdjacency build_adjacency(const IouMatrix&, double);

  std::size_t n_ = 0;
  double tau_ = 0.0;
  std::size_t num_detections_ = 0;
  std::size_t num_labels_ = 0;
  std::vector<double> entries_;
  std::vector<double> raw_iou_;
};

// Throws InvalidArgument if tau is outside (0, 1], both lists are empty, or
// the completed dimension exceeds kMaxAdjacencyDimension.
ScaledAdjacency build_adjacency(std::span<const Box2D> detections,
                                std::span<const Box2D> labels, double tau);
// Same from a precomputed table; throws InvalidArgument for values outside
// [0, 1].
ScaledAdjacency build_adjacency(const IouMatrix& ious, double tau);

// Maximum-cardinality, then maximum-total-IoU matching. Square-completion
// assignments with zero weight are reported as unmatched.
Matching optimal_match(const ScaledAdjacency& adjacency);

// Same, accepting empty inputs (returns the trivial matching).
Matching optimal_match(std::span<const Box2D> detections,
                       std::span<const Box2D> labels, double tau);

struct ScoredBox {
  Box2D box;
  double confidence = 0.0;
};

enum class GreedyOrder { kConfidenceDescending, kInputOrder };

// Each detection, visited in `order`, claims the unclaimed label of highest
// IoU >= tau. Confidence ties go to the lower input index, IoU ties to the
// lower label index.
Matching greedy_match(std::span<const ScoredBox> detections,
                      std::span<const Box2D> labels, double tau,
                      GreedyOrder order = GreedyOrder::kConfidenceDescending);

// Exhaustive oracle over all injective partial assignments. Returns the
// lexicographic optimum: most pairs, then highest total IoU, then the
// smallest label sequence in detection order. Throws InvalidArgument when
// max(#detections, #labels) > kMaxBruteForceDimension.
Matching brute_force_match(std::span<const Box2D> detections,
                           std::span<const Box2D> labels, double tau);
Matching brute_force_match(const IouMatrix& ious, double tau);

enum class MatcherKind { kOptimal, kGreedyConfidence, kBruteForce };

std::string_view to_string(MatcherKind kind);
// Accepts "optimal", "greedy" / "greedy-confidence", "brute-force".
MatcherKind parse_matcher_kind(std::string_view text);

Matching run_matcher(MatcherKind kind, std::span<const ScoredBox> detections,
                     std::span<const Box2D> labels, double tau);

}  // namespace deteval
