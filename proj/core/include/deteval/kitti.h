// KITTI object label / result text format.
//
// One object per line, whitespace separated, in devkit order:
//   type truncated occluded alpha left top right bottom h w l x y z rotation_y [score]
// Labels carry 15 fields, detections 16 (trailing score).
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "deteval/records.h"

namespace deteval {

// Malformed data file. `line` and `column` are 1-based; column counts
// whitespace-separated fields, 0 when the error concerns the whole line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column, std::string message);

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

  ParseError with_file(std::string file) const {
    return ParseError(std::move(file), line_, column_, detail_);
  }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

enum class RecordKind { kLabel, kDetection };

inline constexpr std::size_t kLabelFieldCount = 15;
inline constexpr std::size_t kDetectionFieldCount = 16;

using KittiRecord = std::variant<LabelRecord, DetectionRecord>;

// Throws ParseError (without file name) on arity mismatch, a non-numeric
// field, or out-of-range truncation/occlusion. The -1 sentinel for
// truncation and occlusion is accepted on DontCare labels and on
// detections, and reads as "unknown".
KittiRecord parse_kitti_line(std::string_view text, RecordKind kind, std::size_t line_number = 1);

LabelRecord parse_label_line(std::string_view text, std::size_t line_number = 1);
DetectionRecord parse_detection_line(std::string_view text, std::size_t line_number = 1);

// Inverse of the parsers; numbers use the shortest round-trip text.
std::string format_kitti_line(const LabelRecord& record);
std::string format_kitti_line(const DetectionRecord& record);

// Parses every non-blank line. Errors carry `file_name`.
std::vector<LabelRecord> parse_label_file(std::string_view content, const std::string& file_name);
std::vector<DetectionRecord> parse_detection_file(std::string_view content,
                                                  const std::string& file_name);

// Replaces class names found in `collapse`; a single pass, so chains are
// not followed.
void apply_class_map(std::vector<LabelRecord>& records,
                     const std::map<std::string, std::string>& collapse);
void apply_class_map(std::vector<DetectionRecord>& records,
                     const std::map<std::string, std::string>& collapse);

// Drops detections whose overlap_over_area with any region is >= threshold.
// Throws InvalidArgument unless threshold is in (0, 1].
std::vector<DetectionRecord> suppress_dontcare(std::vector<DetectionRecord> detections,
                                               const std::vector<Box2D>& dontcare_regions,
                                               double overlap_threshold);

}  // namespace deteval
