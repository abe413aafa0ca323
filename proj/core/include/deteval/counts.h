#pragma once

#include <cstddef>

#include "deteval/matching.h"

namespace deteval {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) { return a += b; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// tp = |pairs|, fp = |unmatched detections|, fn = |unmatched labels|.
inline ConfusionCounts counts_from_matching(const Matching& m) {
  return {m.pairs.size(), m.unmatched_detections.size(), m.unmatched_labels.size()};
}

}  // namespace deteval
