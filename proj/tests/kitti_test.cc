#include "deteval/kitti.h"

#include <string>

#include <gtest/gtest.h>

#include "deteval/scenario.h"
#include "mutations.h"
#include "parser_check.h"

namespace deteval {
namespace {

constexpr const char* kCarLine =
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59";

TEST(KittiParse, LabelFields) {
  const LabelRecord r = parse_label_line(kCarLine);
  EXPECT_EQ(r.class_name, "Car");
  EXPECT_EQ(r.truncation, 0.0);
  EXPECT_EQ(r.occlusion, 0);
  EXPECT_DOUBLE_EQ(r.alpha, -1.58);
  EXPECT_DOUBLE_EQ(r.bbox.left, 587.01);
  EXPECT_DOUBLE_EQ(r.bbox.top, 173.33);
  EXPECT_DOUBLE_EQ(r.bbox.right, 614.12);
  EXPECT_DOUBLE_EQ(r.bbox.bottom, 200.12);
  EXPECT_DOUBLE_EQ(r.dimensions_hwl[0], 1.65);
  EXPECT_DOUBLE_EQ(r.location_xyz[2], 46.70);
  EXPECT_DOUBLE_EQ(r.rotation_y, -1.59);
  EXPECT_NEAR(r.box().height(), 26.79, 1e-9);
}

TEST(KittiParse, DetectionScoreAndSentinels) {
  const DetectionRecord d = parse_detection_line(std::string(kCarLine) + " 0.91");
  EXPECT_DOUBLE_EQ(d.score, 0.91);
  EXPECT_EQ(d.class_name(), "Car");

  const DetectionRecord s = parse_detection_line(
      "Car -1 -1 -10 1 2 3 4 -1 -1 -1 -1000 -1000 -1000 -10 0.5");
  EXPECT_FALSE(s.object.truncation.has_value());
  EXPECT_FALSE(s.object.occlusion.has_value());

  // Labels other than DontCare must carry real values.
  EXPECT_THROW(parse_label_line("Car -1 0 0 1 2 3 4 1 1 1 1 1 1 0"), ParseError);
  EXPECT_NO_THROW(parse_label_line("DontCare -1 -1 -10 5 5 5 5 -1 -1 -1 -1000 -1000 -1000 -10"));
}

TEST(KittiParse, ArityErrors) {
  try {
    parse_label_line("Car 0 0 0 1 2 3 4 1 1 1 1 1 1", 7);
    FAIL() << "14 fields accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_EQ(e.column(), 0u);
    EXPECT_NE(std::string(e.what()).find("expected 15 fields"), std::string::npos);
  }
  EXPECT_THROW(parse_detection_line(kCarLine), ParseError);
  EXPECT_THROW(parse_label_line(std::string(kCarLine) + " 0.5"), ParseError);
}

TEST(KittiParse, FieldErrorsNameTheColumn) {
  struct Case {
    const char* line;
    std::size_t column;
  };
  const Case cases[] = {
      {"Car 1.5 0 0 1 2 3 4 1 1 1 1 1 1 0", 2},
      {"Car 0 4 0 1 2 3 4 1 1 1 1 1 1 0", 3},
      {"Car 0 0.5 0 1 2 3 4 1 1 1 1 1 1 0", 3},
      {"Car 0 0 x 1 2 3 4 1 1 1 1 1 1 0", 4},
      {"Car 0 0 0 5 2 3 4 1 1 1 1 1 1 0", 7},
      {"Car 0 0 0 1 9 3 4 1 1 1 1 1 1 0", 8},
      {"Car 0 0 0 1 2 3 4 1 1 1 1 1 nan 0", 14},
      {"Car 0 0 0 1 2 3 4 1 1 1 1 1 1 +0", 15},
  };
  for (const Case& c : cases) {
    try {
      parse_label_line(c.line);
      ADD_FAILURE() << "accepted: " << c.line;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.column(), c.column) << c.line;
    }
  }
}

TEST(KittiParse, FormatRoundTrips) {
  const LabelRecord r = parse_label_line(kCarLine);
  EXPECT_EQ(parse_label_line(format_kitti_line(r)), r);
  const DetectionRecord d =
      parse_detection_line("Pedestrian -1 -1 0.1 10 20 30.5 60.25 1 2 3 4 5 6 0.7 0.123456789");
  EXPECT_EQ(parse_detection_line(format_kitti_line(d)), d);
  EXPECT_NE(format_kitti_line(d).find(" -1 -1 "), std::string::npos);
}

TEST(KittiFile, ErrorsCarryFileAndLine) {
  const std::string content = std::string(kCarLine) + "\n\n   \nCar 0 0 0 1 2 3\n";
  try {
    parse_label_file(content, "labels/000007.txt");
    FAIL() << "corrupt file accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "labels/000007.txt");
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(std::string(e.what()).rfind("labels/000007.txt:4", 0), 0u);
  }
  EXPECT_EQ(parse_label_file(std::string(kCarLine) + "\r\n" + kCarLine, "x").size(), 2u);
  EXPECT_TRUE(parse_detection_file("", "x").empty());
}

TEST(KittiClassMap, SinglePass) {
  std::vector<LabelRecord> labels = {make_label(Box2D(0, 0, 1, 1), "Van"),
                                     make_label(Box2D(0, 0, 1, 1), "Truck"),
                                     make_label(Box2D(0, 0, 1, 1), "Car")};
  apply_class_map(labels, {{"Van", "Car"}, {"Truck", "Van"}});
  EXPECT_EQ(labels[0].class_name, "Car");
  EXPECT_EQ(labels[1].class_name, "Van");
  EXPECT_EQ(labels[2].class_name, "Car");

  std::vector<DetectionRecord> dets = {make_detection(Box2D(0, 0, 1, 1), 0.5, "Van")};
  apply_class_map(dets, {{"Van", "Car"}});
  EXPECT_EQ(dets[0].class_name(), "Car");
}

TEST(KittiDontCare, SuppressionByOverlapOverArea) {
  const std::vector<Box2D> regions = {Box2D(0, 0, 100, 100)};
  const std::vector<DetectionRecord> dets = {
      make_detection(Box2D(10, 10, 50, 50), 0.9),     // inside
      make_detection(Box2D(80, 0, 120, 40), 0.8),     // half inside
      make_detection(Box2D(200, 200, 240, 240), 0.7)  // outside
  };
  const auto at_half = suppress_dontcare(dets, regions, 0.5);
  ASSERT_EQ(at_half.size(), 1u);
  EXPECT_EQ(at_half[0].score, 0.7);
  const auto at_07 = suppress_dontcare(dets, regions, 0.7);
  ASSERT_EQ(at_07.size(), 2u);
  EXPECT_EQ(at_07[0].score, 0.8);
  EXPECT_EQ(suppress_dontcare(dets, {}, 0.5).size(), 3u);
  EXPECT_THROW(suppress_dontcare(dets, regions, 0.0), InvalidArgument);
}

TEST(KittiFuzz, AgreesWithRegexOracleOnMutatedLines) {
  SplitRng rng(8080);
  for (int i = 0; i < 2000; ++i) {
    const bool detection = rng.chance(0.5);
    const auto& seeds = detection ? fuzz::detection_seeds() : fuzz::label_seeds();
    const std::string line = fuzz::mutate(seeds[rng.between(0, seeds.size() - 1)], rng);
    const auto mismatch = fuzz::parser_mismatch(line, detection);
    EXPECT_FALSE(mismatch.has_value()) << *mismatch;
  }
  for (const std::string& s : fuzz::label_seeds()) EXPECT_FALSE(fuzz::parser_mismatch(s, false));
  for (const std::string& s : fuzz::detection_seeds()) EXPECT_FALSE(fuzz::parser_mismatch(s, true));
}

}  // namespace
}  // namespace deteval
