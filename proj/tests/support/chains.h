// Random nested filter chains for stability checks.
#pragma once

#include <vector>

#include "deteval/filters.h"
#include "deteval/scenario.h"

namespace deteval::fixtures {

inline FilterAtom random_atom(SplitRng& rng) {
  static constexpr FilterSide kSides[] = {FilterSide::kDetection, FilterSide::kLabel,
                                          FilterSide::kBoth};
  static constexpr Comparator kComparators[] = {Comparator::kLess, Comparator::kLessEqual,
                                                Comparator::kGreater, Comparator::kGreaterEqual};
  FilterAtom atom;
  atom.side = kSides[rng.between(0, 2)];
  atom.comparator = kComparators[rng.between(0, 3)];
  switch (rng.between(0, 5)) {
    case 0:
      atom.attribute.kind = AttributeKind::kArea;
      atom.value = rng.uniform(300.0, 12000.0);
      break;
    case 1:
      atom.attribute.kind = AttributeKind::kWidth;
      atom.value = rng.uniform(20.0, 120.0);
      break;
    case 2:
      atom.attribute.kind = AttributeKind::kHeightPx;
      atom.value = rng.uniform(16.0, 96.0);
      break;
    case 3:
      atom.attribute.kind = AttributeKind::kOcclusion;
      atom.value = static_cast<double>(rng.between(0, 2));
      break;
    case 4:
      atom.attribute.kind = AttributeKind::kTruncation;
      atom.value = rng.uniform(0.0, 0.6);
      break;
    default:
      atom.attribute.kind = AttributeKind::kDistance;
      atom.value = rng.uniform(4.0, 70.0);
      break;
  }
  return atom;
}

// F1 ⊇ F2 ⊇ ... ⊇ Fk: each link adds one atom to the previous conjunction.
inline std::vector<FilterSpec> random_filter_chain(SplitRng& rng, std::size_t length) {
  std::vector<FilterSpec> chain;
  FilterSpec current;
  for (std::size_t i = 0; i < length; ++i) {
    current = current & FilterSpec({random_atom(rng)});
    chain.push_back(current);
  }
  return chain;
}

}  // namespace deteval::fixtures
