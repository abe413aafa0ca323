#include "deteval/matching.h"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "deteval/assignment.h"
#include "deteval/counts.h"
#include "deteval/scenario.h"
#include "fixtures.h"
#include "oracles.h"

namespace deteval {
namespace {

using fixtures::crossing_detection_boxes;
using fixtures::crossing_detections;
using fixtures::crossing_labels;

TEST(ScaledAdjacency, ScaleExamples) {
  EXPECT_NEAR(ScaledAdjacency::scale(0.56, 2), 0.32, 1e-12);
  EXPECT_NEAR(ScaledAdjacency::scale(0.72, 2), 0.34, 1e-12);
  const std::vector<Box2D> d{Box2D(0, 0, 0.49, 1)};
  const std::vector<Box2D> l{Box2D(0, 0, 1, 1)};
  EXPECT_EQ(build_adjacency(d, l, 0.5).entry(0, 0), 0.0);
  EXPECT_NEAR(build_adjacency(d, l, 0.5).raw_iou(0, 0), 0.49, 1e-15);
}

TEST(ScaledAdjacency, CrossingEntries) {
  const ScaledAdjacency adj = build_adjacency(crossing_detection_boxes(), crossing_labels(), fixtures::kCrossingTau);
  ASSERT_EQ(adj.dimension(), 2u);
  EXPECT_NEAR(adj.raw_iou(0, 0), 0.56, 1e-12);
  EXPECT_NEAR(adj.raw_iou(0, 1), 0.72, 1e-12);
  EXPECT_NEAR(adj.raw_iou(1, 1), 0.56, 1e-12);
  EXPECT_NEAR(adj.raw_iou(1, 0), 0.09375, 1e-12);
  EXPECT_NEAR(adj.entry(0, 0), 0.32, 1e-12);
  EXPECT_NEAR(adj.entry(0, 1), 0.34, 1e-12);
  EXPECT_NEAR(adj.entry(1, 1), 0.32, 1e-12);
  EXPECT_EQ(adj.entry(1, 0), 0.0);
}

TEST(ScaledAdjacency, RejectsBadInput) {
  const std::vector<Box2D> none;
  const std::vector<Box2D> one{Box2D(0, 0, 1, 1)};
  EXPECT_THROW(build_adjacency(none, none, 0.5), InvalidArgument);
  EXPECT_THROW(build_adjacency(one, one, 0.0), InvalidArgument);
  EXPECT_THROW(build_adjacency(one, one, 1.5), InvalidArgument);
  EXPECT_THROW(build_adjacency(one, one, std::nan("")), InvalidArgument);
  const std::vector<Box2D> many(kMaxAdjacencyDimension + 1, Box2D(0, 0, 1, 1));
  EXPECT_THROW(build_adjacency(many, one, 0.5), InvalidArgument);
}

TEST(ScaledAdjacency, InvariantsOnRandomScenarios) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Scenario s = generate_scenario(seed, {});
    if (s.detections.empty() && s.labels.empty()) continue;
    const double tau = 0.25 + 0.25 * static_cast<double>(seed % 3);
    const ScaledAdjacency adj = build_adjacency(s.detection_boxes(), s.label_boxes(), tau);
    const std::size_t n = adj.dimension();
    ASSERT_EQ(n, std::max(s.detections.size(), s.labels.size()));
    const double lo = 1.0 / (2.0 * n);
    const double hi = lo + 1.0 / (2.0 * n * n);
    for (std::size_t d = 0; d < n; ++d) {
      for (std::size_t l = 0; l < n; ++l) {
        const double e = adj.entry(d, l);
        if (d >= s.detections.size() || l >= s.labels.size()) {
          EXPECT_EQ(e, 0.0);
          EXPECT_EQ(adj.raw_iou(d, l), 0.0);
          continue;
        }
        EXPECT_EQ(adj.raw_iou(d, l), iou(s.detections[d].box(), s.labels[l].box()));
        if (adj.raw_iou(d, l) < tau) {
          EXPECT_EQ(e, 0.0);
        } else {
          EXPECT_GE(e, lo);
          EXPECT_LE(e, hi + 1e-15);
          EXPECT_DOUBLE_EQ(e, (adj.raw_iou(d, l) + n) / (2.0 * n * n));
        }
      }
    }
  }
}

TEST(ScaledAdjacency, MorePairsAlwaysOutweighFewer) {
  // k smallest entries vs k-1 largest entries, for every n up to 50.
  for (std::size_t n = 1; n <= 50; ++n) {
    const double smallest = ScaledAdjacency::scale(1e-9, n);
    const double largest = ScaledAdjacency::scale(1.0, n);
    for (std::size_t k = 1; k <= n; ++k) {
      EXPECT_GT(static_cast<long double>(k) * smallest,
                static_cast<long double>(k - 1) * largest);
    }
  }
}

TEST(OptimalMatch, CrossingYieldsTwoPairs) {
  const Matching m = optimal_match(crossing_detection_boxes(), crossing_labels(), fixtures::kCrossingTau);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.pairs[0].detection, 0u);
  EXPECT_EQ(m.pairs[0].label, 0u);
  EXPECT_EQ(m.pairs[1].detection, 1u);
  EXPECT_EQ(m.pairs[1].label, 1u);
  EXPECT_EQ(counts_from_matching(m), (ConfusionCounts{2, 0, 0}));
  EXPECT_EQ(m, brute_force_match(crossing_detection_boxes(), crossing_labels(), fixtures::kCrossingTau));
}

TEST(GreedyMatch, CrossingStrandsOnePair) {
  const Matching m = greedy_match(crossing_detections(), crossing_labels(), fixtures::kCrossingTau);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].detection, 0u);
  EXPECT_EQ(m.pairs[0].label, 1u);
  EXPECT_EQ(counts_from_matching(m), (ConfusionCounts{1, 1, 1}));
  // Visiting d1 first recovers both pairs.
  std::vector<ScoredBox> swapped = crossing_detections();
  std::swap(swapped[0].confidence, swapped[1].confidence);
  EXPECT_EQ(greedy_match(swapped, crossing_labels(), fixtures::kCrossingTau).pairs.size(), 2u);
}

TEST(GreedyMatch, TieBreaking) {
  const std::vector<Box2D> labels{Box2D(0, 0, 10, 10), Box2D(0, 0, 10, 10)};
  const std::vector<ScoredBox> dets{{Box2D(0, 0, 10, 10), 0.5}, {Box2D(0, 0, 10, 10), 0.5}};
  const Matching m = greedy_match(dets, labels, 0.5);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.pairs[0].label, 0u);
  EXPECT_EQ(m.pairs[1].label, 1u);
  // Input order ignores confidence.
  const std::vector<ScoredBox> ranked{{Box2D(0, 0, 10, 9), 0.1}, {Box2D(0, 0, 10, 10), 0.9}};
  const std::vector<Box2D> single{Box2D(0, 0, 10, 10)};
  EXPECT_EQ(greedy_match(ranked, single, 0.5, GreedyOrder::kInputOrder).pairs[0].detection, 0u);
  EXPECT_EQ(greedy_match(ranked, single, 0.5).pairs[0].detection, 1u);
}

TEST(Matchers, EmptyInputs) {
  const std::vector<Box2D> none;
  const std::vector<Box2D> three{Box2D(0, 0, 1, 1), Box2D(2, 2, 3, 3), Box2D(4, 4, 5, 5)};
  const Matching m = optimal_match(none, three, 0.5);
  EXPECT_TRUE(m.pairs.empty());
  EXPECT_EQ(m.unmatched_labels, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(optimal_match(three, none, 0.5).unmatched_detections.size(), 3u);
  EXPECT_EQ(brute_force_match(none, three, 0.5), m);
  EXPECT_EQ(greedy_match({}, three, 0.5), m);
}

TEST(Matchers, DisjointBoxesNeverPair) {
  ScenarioParams params;
  params.overlap_bias = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Scenario s = generate_scenario(seed, params);
    for (MatcherKind k : {MatcherKind::kOptimal, MatcherKind::kGreedyConfidence, MatcherKind::kBruteForce}) {
      EXPECT_TRUE(run_matcher(k, s.scored_detections(), s.label_boxes(), 0.5).pairs.empty());
    }
  }
}

TEST(BruteForce, SizeGuardAndSingleton) {
  const std::vector<Box2D> nine(kMaxBruteForceDimension + 1, Box2D(0, 0, 1, 1));
  const std::vector<Box2D> one{Box2D(0, 0, 1, 1)};
  EXPECT_THROW(brute_force_match(nine, one, 0.5), InvalidArgument);
  EXPECT_EQ(brute_force_match(one, one, 0.5).pairs.size(), 1u);
}

TEST(BruteForce, PrefersSmallestLabelSequenceOnTies) {
  const std::vector<Box2D> same{Box2D(0, 0, 1, 1), Box2D(0, 0, 1, 1)};
  const Matching m = brute_force_match(same, same, 0.5);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.pairs[0].label, 0u);
  EXPECT_EQ(m.pairs[1].label, 1u);
}

TEST(OptimalMatch, ScalingNecessityFixture) {
  const std::vector<Box2D> d = fixtures::scaling_detections();
  const std::vector<Box2D> l = fixtures::scaling_labels();
  const double tau = fixtures::kScalingTau;

  // Raw thresholded IoU weights: the heaviest assignment keeps only 2 pairs.
  WeightMatrix raw(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double v = iou(d[i], l[j]);
      raw(i, j) = v >= tau ? v : 0.0;
    }
  }
  const std::vector<std::size_t> raw_pick = solve_max_weight_assignment(raw);
  std::size_t raw_pairs = 0;
  for (std::size_t i = 0; i < 3; ++i) raw_pairs += raw(i, raw_pick[i]) > 0.0;
  EXPECT_EQ(raw_pairs, 2u);
  EXPECT_NEAR(static_cast<double>(assignment_weight(raw, raw_pick)), 8.0 / 9 + 18.0 / 19, 1e-12);

  // Scaled weights recover the perfect matching.
  const Matching m = optimal_match(d, l, tau);
  EXPECT_EQ(m.pairs.size(), 3u);
  EXPECT_NEAR(m.total_iou(), 5.0 / 8 + 0.5 + 10.0 / 19, 1e-12);
  const oracle::BestMatching best = oracle::permutation_best(d, l, tau);
  EXPECT_EQ(best.pairs, 3u);
  EXPECT_NEAR(best.total_iou, m.total_iou(), 1e-12);
}

TEST(OptimalMatch, AgreesWithBruteForceOnAllBinaryPatterns) {
  // Entry (i, j) is 0.9 when bit 3i+j of the mask is set, else 0.
  for (unsigned mask = 0; mask < 512; ++mask) {
    IouMatrix table{3, 3, std::vector<double>(9, 0.0)};
    for (unsigned bit = 0; bit < 9; ++bit) {
      if ((mask >> bit) & 1u) table.values[bit] = 0.9;
    }
    const Matching opt = optimal_match(build_adjacency(table, 0.5));
    const Matching brute = brute_force_match(table, 0.5);

    // Maximum cardinality by direct enumeration of the 6 permutations.
    std::vector<std::size_t> perm{0, 1, 2};
    std::size_t best = 0;
    do {
      std::size_t k = 0;
      for (std::size_t i = 0; i < 3; ++i) k += table(i, perm[i]) > 0.0;
      best = std::max(best, k);
    } while (std::next_permutation(perm.begin(), perm.end()));

    EXPECT_EQ(opt.pairs.size(), best) << "mask " << mask;
    EXPECT_EQ(brute.pairs.size(), best) << "mask " << mask;
    EXPECT_NEAR(opt.total_iou(), 0.9 * static_cast<double>(best), 1e-12);
    EXPECT_NO_THROW(check_matching(opt, 3, 3, 0.5));
  }
}

TEST(IouMatrix, RejectsMalformedTables) {
  EXPECT_THROW(build_adjacency(IouMatrix{2, 2, {0.1, 0.2, 0.3}}, 0.5), InvalidArgument);
  EXPECT_THROW(build_adjacency(IouMatrix{1, 1, {1.5}}, 0.5), InvalidArgument);
  EXPECT_THROW(brute_force_match(IouMatrix{1, 1, {-0.1}}, 0.5), InvalidArgument);
  const std::vector<Box2D> d{Box2D(0, 0, 2, 2)};
  const std::vector<Box2D> l{Box2D(1, 0, 3, 2)};
  EXPECT_EQ(iou_matrix(d, l).values, std::vector<double>{iou(d[0], l[0])});
}

class RandomScenarioAgreement : public ::testing::TestWithParam<double> {};

TEST_P(RandomScenarioAgreement, OptimalEqualsBruteForce) {
  const double tau = GetParam();
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    const Scenario s = generate_scenario(seed * 7919 + 13, {});
    const auto dets = s.detection_boxes();
    const auto labels = s.label_boxes();
    const Matching opt = optimal_match(dets, labels, tau);
    const Matching brute = brute_force_match(dets, labels, tau);
    const Matching greedy = greedy_match(s.scored_detections(), labels, tau);
    for (const Matching* m : {&opt, &brute, &greedy}) {
      EXPECT_NO_THROW(check_matching(*m, dets.size(), labels.size(), tau));
    }
    ASSERT_EQ(opt.pairs.size(), brute.pairs.size()) << "seed " << seed;
    EXPECT_NEAR(opt.total_iou(), brute.total_iou(), 1e-9) << "seed " << seed;
    EXPECT_LE(greedy.pairs.size(), opt.pairs.size());
    if (std::max(dets.size(), labels.size()) <= 6) {
      const oracle::BestMatching best = oracle::permutation_best(dets, labels, tau);
      EXPECT_EQ(best.pairs, brute.pairs.size());
      EXPECT_NEAR(best.total_iou, brute.total_iou(), 1e-9);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Taus, RandomScenarioAgreement, ::testing::Values(0.25, 0.5, 0.7));

TEST(CheckMatching, RejectsBrokenMatchings) {
  Matching m;
  m.pairs = {{0, 0, 0.9}, {1, 0, 0.9}};
  EXPECT_THROW(check_matching(m, 2, 1, 0.5), InvalidArgument);
  m.pairs = {{0, 0, 0.4}};
  m.unmatched_detections = {1};
  EXPECT_THROW(check_matching(m, 2, 1, 0.5), InvalidArgument);
  m.pairs = {{0, 0, 0.6}};
  EXPECT_NO_THROW(check_matching(m, 2, 1, 0.5));
  m.unmatched_detections = {};
  EXPECT_THROW(check_matching(m, 2, 1, 0.5), InvalidArgument);
  m.unmatched_detections = {5};
  EXPECT_THROW(check_matching(m, 2, 1, 0.5), InvalidArgument);
}

TEST(MatcherKind, ParseRoundTrip) {
  for (MatcherKind k : {MatcherKind::kOptimal, MatcherKind::kGreedyConfidence, MatcherKind::kBruteForce}) {
    EXPECT_EQ(parse_matcher_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_matcher_kind("greedy"), MatcherKind::kGreedyConfidence);
  EXPECT_THROW(parse_matcher_kind("hungarian"), InvalidArgument);
}

}  // namespace
}  // namespace deteval
