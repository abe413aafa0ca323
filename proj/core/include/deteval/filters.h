// Filtered metrics over a fixed association.
//
// A filtered measure is computed on the subset of the unfiltered
// detection-label pairs (at fixed tau) whose members both satisfy the filter:
//
//   full pair (det, label)  -> TP if both pass, otherwise dropped entirely
//   label single (label, ∅) -> FN if the label passes
//   detection single (∅, det) -> FP if the detection passes
//
// Nothing is re-matched, so no filter can produce more TPs, FPs, or FNs than
// the unfiltered evaluation. Striking records first and re-matching (the
// naive scheme) does not have that property; it is kept for comparison.
#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deteval/counts.h"
#include "deteval/matching.h"
#include "deteval/records.h"

namespace deteval {

// Filter grammar or attribute lookup failure.
class FilterError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class FilterSide { kDetection, kLabel, kBoth };
enum class Comparator { kLess, kLessEqual, kGreater, kGreaterEqual, kEqual };

enum class AttributeKind {
  kArea,
  kWidth,
  kHeightPx,
  kBboxHeight,  // same quantity as kHeightPx; KITTI devkit name
  kTruncation,
  kOcclusion,
  kDistance,  // camera-frame depth (location z)
  kCustom,    // key into LabelRecord::extra
};

struct FilterAttribute {
  AttributeKind kind = AttributeKind::kArea;
  std::string custom_key;

  friend bool operator==(const FilterAttribute&, const FilterAttribute&) = default;
};

struct FilterAtom {
  FilterSide side = FilterSide::kBoth;
  FilterAttribute attribute;
  Comparator comparator = Comparator::kGreaterEqual;
  double value = 0.0;

  friend bool operator==(const FilterAtom&, const FilterAtom&) = default;
};

// Attribute value of a record. Unknown occlusion reads as 2 (passes the
// hard difficulty bound, fails easy and medium). Throws FilterError for
// unknown truncation or an absent custom key.
double attribute_value(const LabelRecord& record, const FilterAttribute& attribute);

bool compare(double lhs, Comparator cmp, double rhs);

// Conjunction of atoms. Empty means always true.
class FilterSpec {
 public:
  FilterSpec() = default;
  explicit FilterSpec(std::vector<FilterAtom> atoms) : atoms_(std::move(atoms)) {}

  // Parses `side.attribute OP value` atoms joined by `&`, for example
  // `label.area >= 1600 & label.occlusion <= 1`. Blank text gives the
  // always-true filter. Throws FilterError naming the offending atom.
  static FilterSpec parse(std::string_view text);

  const std::vector<FilterAtom>& atoms() const { return atoms_; }
  bool always_true() const { return atoms_.empty(); }

  bool passes_label(const LabelRecord& label) const;
  bool passes_detection(const DetectionRecord& detection) const;

  // Canonical text; parse(to_string()) reproduces the filter.
  std::string to_string() const;

  FilterSpec operator&(const FilterSpec& other) const;

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;

 private:
  std::vector<FilterAtom> atoms_;
};

enum class Difficulty { kEasy, kMedium, kHard };

std::string_view to_string(Difficulty level);
Difficulty parse_difficulty(std::string_view text);

// KITTI object devkit thresholds (MIN_HEIGHT, MAX_OCCLUSION,
// MAX_TRUNCATION), indexed easy / medium / hard.
struct DifficultyThresholds {
  std::array<double, 3> min_height_px = {40.0, 25.0, 25.0};
  std::array<double, 3> max_occlusion = {0.0, 1.0, 2.0};
  std::array<double, 3> max_truncation = {0.15, 0.30, 0.50};
};

// Label side: height, occlusion and truncation bounds. Detection side:
// the same height bound only.
FilterSpec difficulty_filter(Difficulty level, const DifficultyThresholds& thresholds = {});

// The association recast as null-padded pairs. Immutable once built.
class PairSet {
 public:
  struct FullPair {
    DetectionRecord detection;
    LabelRecord label;
    double iou = 0.0;
  };

  double tau() const { return tau_; }
  const std::vector<FullPair>& full_pairs() const { return full_pairs_; }
  const std::vector<LabelRecord>& label_singles() const { return label_singles_; }
  const std::vector<DetectionRecord>& detection_singles() const { return detection_singles_; }

 private:
  friend PairSet build_pair_set(const Matching&, std::span<const DetectionRecord>,
                                std::span<const LabelRecord>, double);

  double tau_ = 0.0;
  std::vector<FullPair> full_pairs_;
  std::vector<LabelRecord> label_singles_;
  std::vector<DetectionRecord> detection_singles_;
};

// Throws InvalidArgument when the matching references an index outside the
// record lists or does not partition them.
PairSet build_pair_set(const Matching& matching, std::span<const DetectionRecord> detections,
                       std::span<const LabelRecord> labels, double tau);

// Single pass over the pair set; never re-matches.
ConfusionCounts filtered_counts(const PairSet& pairs, const FilterSpec& filter);

// Strike failing records, then match the survivors.
ConfusionCounts naive_filtered_counts(std::span<const DetectionRecord> detections,
                                      std::span<const LabelRecord> labels,
                                      const FilterSpec& filter, double tau,
                                      MatcherKind matcher);

// Matches records with the chosen matcher.
Matching match_records(std::span<const DetectionRecord> detections,
                       std::span<const LabelRecord> labels, double tau, MatcherKind matcher);

}  // namespace deteval
