// The small KITTI dataset under tests/data/fixture.
#pragma once

#include <filesystem>
#include <vector>

#include "deteval/dataset.h"
#include "deteval/evaluate.h"
#include "deteval/filters.h"

namespace deteval::fixtures {

inline std::filesystem::path fixture_root() { return DETEVAL_TEST_DATA_DIR "/fixture"; }

inline std::vector<FramePair> fixture_frames() {
  return load_dataset(fixture_root() / "labels", fixture_root() / "detections");
}

// tau 0.7 with the KITTI medium difficulty as an extra filter.
inline EvalConfig fixture_config() {
  EvalConfig c;
  c.tau = 0.7;
  c.filters.push_back({"medium", difficulty_filter(Difficulty::kMedium)});
  return c;
}

}  // namespace deteval::fixtures
