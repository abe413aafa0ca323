#include "deteval/filters.h"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <utility>

#include "deteval/numeric_text.h"

namespace deteval {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

constexpr std::pair<std::string_view, AttributeKind> kAttributeNames[] = {
    {"area", AttributeKind::kArea},
    {"width", AttributeKind::kWidth},
    {"height_px", AttributeKind::kHeightPx},
    {"bbox_height", AttributeKind::kBboxHeight},
    {"truncation", AttributeKind::kTruncation},
    {"occlusion", AttributeKind::kOcclusion},
    {"distance", AttributeKind::kDistance},
};

std::string attribute_name(const FilterAttribute& a) {
  if (a.kind == AttributeKind::kCustom) return a.custom_key;
  for (const auto& [name, kind] : kAttributeNames) {
    if (kind == a.kind) return std::string(name);
  }
  return "?";
}

std::string_view side_name(FilterSide side) {
  switch (side) {
    case FilterSide::kDetection: return "detection";
    case FilterSide::kLabel: return "label";
    case FilterSide::kBoth: return "both";
  }
  return "?";
}

std::string_view comparator_text(Comparator c) {
  switch (c) {
    case Comparator::kLess: return "<";
    case Comparator::kLessEqual: return "<=";
    case Comparator::kGreater: return ">";
    case Comparator::kGreaterEqual: return ">=";
    case Comparator::kEqual: return "==";
  }
  return "?";
}

FilterAtom parse_atom(std::string_view raw) {
  const std::string_view text = trim(raw);
  auto fail = [&](const std::string& why) -> FilterError {
    return FilterError("bad filter atom '" + std::string(text) + "': " + why);
  };
  if (text.empty()) throw fail("empty atom");

  // Longest operators first so "<=" is not read as "<".
  static constexpr std::pair<std::string_view, Comparator> kOps[] = {
      {"<=", Comparator::kLessEqual}, {">=", Comparator::kGreaterEqual},
      {"==", Comparator::kEqual},     {"<", Comparator::kLess},
      {">", Comparator::kGreater},
  };
  std::size_t op_pos = std::string_view::npos;
  std::size_t op_len = 0;
  Comparator cmp = Comparator::kEqual;
  for (const auto& [op, c] : kOps) {
    const std::size_t pos = text.find(op);
    if (pos != std::string_view::npos && (op_pos == std::string_view::npos || pos < op_pos ||
                                          (pos == op_pos && op.size() > op_len))) {
      op_pos = pos;
      op_len = op.size();
      cmp = c;
    }
  }
  if (op_pos == std::string_view::npos) throw fail("missing comparator (<, <=, >, >=, ==)");

  const std::string_view lhs = trim(text.substr(0, op_pos));
  const std::string_view rhs = trim(text.substr(op_pos + op_len));
  const std::size_t dot = lhs.find('.');
  if (dot == std::string_view::npos) throw fail("expected side.attribute");
  const std::string_view side_text = lhs.substr(0, dot);
  const std::string_view attr_text = lhs.substr(dot + 1);

  FilterAtom atom;
  if (side_text == "detection") {
    atom.side = FilterSide::kDetection;
  } else if (side_text == "label") {
    atom.side = FilterSide::kLabel;
  } else if (side_text == "both") {
    atom.side = FilterSide::kBoth;
  } else {
    throw fail("unknown side '" + std::string(side_text) + "' (detection, label or both)");
  }

  if (!is_identifier(attr_text)) throw fail("invalid attribute name '" + std::string(attr_text) + "'");
  atom.attribute.kind = AttributeKind::kCustom;
  for (const auto& [name, kind] : kAttributeNames) {
    if (attr_text == name) atom.attribute.kind = kind;
  }
  if (atom.attribute.kind == AttributeKind::kCustom) atom.attribute.custom_key = std::string(attr_text);

  atom.comparator = cmp;
  const std::optional<double> value = parse_double(rhs);
  if (!value) throw fail("value '" + std::string(rhs) + "' is not a finite number");
  atom.value = *value;
  return atom;
}

bool atom_applies(FilterSide atom_side, FilterSide record_side) {
  return atom_side == FilterSide::kBoth || atom_side == record_side;
}

bool passes(const std::vector<FilterAtom>& atoms, const LabelRecord& record, FilterSide side) {
  for (const FilterAtom& atom : atoms) {
    if (!atom_applies(atom.side, side)) continue;
    if (!compare(attribute_value(record, atom.attribute), atom.comparator, atom.value)) {
      return false;
    }
  }
  return true;
}

}  // namespace

double attribute_value(const LabelRecord& record, const FilterAttribute& attribute) {
  const BoxCorners& b = record.bbox;
  switch (attribute.kind) {
    case AttributeKind::kArea: return (b.right - b.left) * (b.bottom - b.top);
    case AttributeKind::kWidth: return b.right - b.left;
    case AttributeKind::kHeightPx:
    case AttributeKind::kBboxHeight: return b.bottom - b.top;
    case AttributeKind::kTruncation:
      if (!record.truncation) throw FilterError("record has unknown truncation");
      return *record.truncation;
    case AttributeKind::kOcclusion: return record.occlusion ? *record.occlusion : 2.0;
    case AttributeKind::kDistance: return record.location_xyz[2];
    case AttributeKind::kCustom: {
      const auto it = record.extra.find(attribute.custom_key);
      if (it == record.extra.end()) {
        throw FilterError("record has no attribute '" + attribute.custom_key + "'");
      }
      return it->second;
    }
  }
  throw FilterError("unknown attribute kind");
}

bool compare(double lhs, Comparator cmp, double rhs) {
  switch (cmp) {
    case Comparator::kLess: return lhs < rhs;
    case Comparator::kLessEqual: return lhs <= rhs;
    case Comparator::kGreater: return lhs > rhs;
    case Comparator::kGreaterEqual: return lhs >= rhs;
    case Comparator::kEqual: return lhs == rhs;
  }
  return false;
}

FilterSpec FilterSpec::parse(std::string_view text) {
  std::vector<FilterAtom> atoms;
  if (trim(text).empty()) return FilterSpec{};
  std::size_t start = 0;
  while (true) {
    const std::size_t amp = text.find('&', start);
    atoms.push_back(parse_atom(text.substr(start, amp == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : amp - start)));
    if (amp == std::string_view::npos) break;
    start = amp + 1;
  }
  return FilterSpec(std::move(atoms));
}

bool FilterSpec::passes_label(const LabelRecord& label) const {
  return passes(atoms_, label, FilterSide::kLabel);
}

bool FilterSpec::passes_detection(const DetectionRecord& detection) const {
  return passes(atoms_, detection.object, FilterSide::kDetection);
}

std::string FilterSpec::to_string() const {
  std::string out;
  for (const FilterAtom& atom : atoms_) {
    if (!out.empty()) out += " & ";
    out += side_name(atom.side);
    out += '.';
    out += attribute_name(atom.attribute);
    out += ' ';
    out += comparator_text(atom.comparator);
    out += ' ';
    out += format_shortest(atom.value);
  }
  return out;
}

FilterSpec FilterSpec::operator&(const FilterSpec& other) const {
  std::vector<FilterAtom> atoms = atoms_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  return FilterSpec(std::move(atoms));
}

std::string_view to_string(Difficulty level) {
  switch (level) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kMedium: return "medium";
    case Difficulty::kHard: return "hard";
  }
  return "?";
}

Difficulty parse_difficulty(std::string_view text) {
  if (text == "easy") return Difficulty::kEasy;
  if (text == "medium" || text == "moderate") return Difficulty::kMedium;
  if (text == "hard") return Difficulty::kHard;
  throw InvalidArgument("unknown difficulty '" + std::string(text) +
                        "' (expected easy, medium or hard)");
}

FilterSpec difficulty_filter(Difficulty level, const DifficultyThresholds& thresholds) {
  const auto i = static_cast<std::size_t>(level);
  const FilterAttribute height{AttributeKind::kBboxHeight, {}};
  return FilterSpec({
      {FilterSide::kBoth, height, Comparator::kGreaterEqual, thresholds.min_height_px[i]},
      {FilterSide::kLabel, {AttributeKind::kOcclusion, {}}, Comparator::kLessEqual,
       thresholds.max_occlusion[i]},
      {FilterSide::kLabel, {AttributeKind::kTruncation, {}}, Comparator::kLessEqual,
       thresholds.max_truncation[i]},
  });
}

PairSet build_pair_set(const Matching& matching, std::span<const DetectionRecord> detections,
                       std::span<const LabelRecord> labels, double tau) {
  check_matching(matching, detections.size(), labels.size(), tau);
  PairSet set;
  set.tau_ = tau;
  set.full_pairs_.reserve(matching.pairs.size());
  for (const MatchedPair& p : matching.pairs) {
    set.full_pairs_.push_back({detections[p.detection], labels[p.label], p.iou});
  }
  for (std::size_t l : matching.unmatched_labels) set.label_singles_.push_back(labels[l]);
  for (std::size_t d : matching.unmatched_detections) {
    set.detection_singles_.push_back(detections[d]);
  }
  return set;
}

ConfusionCounts filtered_counts(const PairSet& pairs, const FilterSpec& filter) {
  ConfusionCounts c;
  for (const PairSet::FullPair& p : pairs.full_pairs()) {
    if (filter.passes_detection(p.detection) && filter.passes_label(p.label)) ++c.tp;
  }
  for (const LabelRecord& l : pairs.label_singles()) {
    if (filter.passes_label(l)) ++c.fn;
  }
  for (const DetectionRecord& d : pairs.detection_singles()) {
    if (filter.passes_detection(d)) ++c.fp;
  }
  return c;
}

Matching match_records(std::span<const DetectionRecord> detections,
                       std::span<const LabelRecord> labels, double tau, MatcherKind matcher) {
  std::vector<ScoredBox> dets;
  dets.reserve(detections.size());
  for (const DetectionRecord& d : detections) dets.push_back({d.box(), d.score});
  std::vector<Box2D> boxes;
  boxes.reserve(labels.size());
  for (const LabelRecord& l : labels) boxes.push_back(l.box());
  return run_matcher(matcher, dets, boxes, tau);
}

ConfusionCounts naive_filtered_counts(std::span<const DetectionRecord> detections,
                                      std::span<const LabelRecord> labels,
                                      const FilterSpec& filter, double tau,
                                      MatcherKind matcher) {
  std::vector<DetectionRecord> kept_dets;
  std::copy_if(detections.begin(), detections.end(), std::back_inserter(kept_dets),
               [&](const DetectionRecord& d) { return filter.passes_detection(d); });
  std::vector<LabelRecord> kept_labels;
  std::copy_if(labels.begin(), labels.end(), std::back_inserter(kept_labels),
               [&](const LabelRecord& l) { return filter.passes_label(l); });
  return counts_from_matching(match_records(kept_dets, kept_labels, tau, matcher));
}

}  // namespace deteval
