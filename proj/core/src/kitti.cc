#include "deteval/kitti.h"

#include <algorithm>

#include "deteval/numeric_text.h"

namespace deteval {
namespace {

std::string describe(const std::string& file, std::size_t line, std::size_t column,
                     const std::string& message) {
  std::string out = file.empty() ? std::string("line ") : file + ":";
  out += std::to_string(line);
  if (column > 0) out += ": field " + std::to_string(column);
  return out + ": " + message;
}

std::vector<std::string_view> split_fields(std::string_view text) {
  std::vector<std::string_view> fields;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; };
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) fields.push_back(text.substr(start, i - start));
  }
  return fields;
}

class LineParser {
 public:
  LineParser(std::vector<std::string_view> fields, std::size_t line)
      : fields_(std::move(fields)), line_(line) {}

  [[noreturn]] void fail(std::size_t column, const std::string& message) const {
    throw ParseError("", line_, column, message);
  }

  std::string_view text(std::size_t column) const { return fields_[column - 1]; }

  double number(std::size_t column, const char* name) const {
    const std::optional<double> v = parse_double(text(column));
    if (!v) fail(column, std::string(name) + " '" + std::string(text(column)) + "' is not a finite number");
    return *v;
  }

  int integer(std::size_t column, const char* name) const {
    const std::optional<int> v = parse_int(text(column));
    if (!v) fail(column, std::string(name) + " '" + std::string(text(column)) + "' is not an integer");
    return *v;
  }

 private:
  std::vector<std::string_view> fields_;
  std::size_t line_;
};

LabelRecord parse_common(const LineParser& p, bool allow_sentinels) {
  LabelRecord r;
  r.class_name = std::string(p.text(1));
  const bool sentinels_ok = allow_sentinels || r.class_name == kDontCareClass;

  const double truncation = p.number(2, "truncation");
  if (truncation == -1.0 && sentinels_ok) {
    r.truncation = std::nullopt;
  } else if (truncation < 0.0 || truncation > 1.0) {
    p.fail(2, "truncation " + format_shortest(truncation) + " outside [0, 1]");
  } else {
    r.truncation = truncation;
  }

  const int occlusion = p.integer(3, "occlusion");
  if (occlusion == -1 && sentinels_ok) {
    r.occlusion = std::nullopt;
  } else if (occlusion < 0 || occlusion > 3) {
    p.fail(3, "occlusion " + std::to_string(occlusion) + " outside {0, 1, 2, 3}");
  } else {
    r.occlusion = occlusion;
  }

  r.alpha = p.number(4, "alpha");
  r.bbox = {p.number(5, "bbox left"), p.number(6, "bbox top"), p.number(7, "bbox right"),
            p.number(8, "bbox bottom")};
  if (r.class_name != kDontCareClass) {
    if (!(r.bbox.left < r.bbox.right)) p.fail(7, "bbox right must exceed left");
    if (!(r.bbox.top < r.bbox.bottom)) p.fail(8, "bbox bottom must exceed top");
  }
  r.dimensions_hwl = {p.number(9, "height"), p.number(10, "width"), p.number(11, "length")};
  r.location_xyz = {p.number(12, "location x"), p.number(13, "location y"),
                    p.number(14, "location z")};
  r.rotation_y = p.number(15, "rotation_y");
  return r;
}

std::string format_common(const LabelRecord& r) {
  std::string out = r.class_name;
  auto add = [&](const std::string& s) {
    out += ' ';
    out += s;
  };
  add(r.truncation ? format_shortest(*r.truncation) : "-1");
  add(r.occlusion ? std::to_string(*r.occlusion) : "-1");
  add(format_shortest(r.alpha));
  for (double v : {r.bbox.left, r.bbox.top, r.bbox.right, r.bbox.bottom}) add(format_shortest(v));
  for (double v : r.dimensions_hwl) add(format_shortest(v));
  for (double v : r.location_xyz) add(format_shortest(v));
  add(format_shortest(r.rotation_y));
  return out;
}

template <typename Record>
std::vector<Record> parse_file(std::string_view content, const std::string& file_name,
                               RecordKind kind) {
  std::vector<Record> out;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t nl = content.find('\n', pos);
    const std::string_view line =
        content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_number;
    if (!split_fields(line).empty()) {
      try {
        out.push_back(std::get<Record>(parse_kitti_line(line, kind, line_number)));
      } catch (const ParseError& e) {
        throw e.with_file(file_name);
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::string file, std::size_t line, std::size_t column, std::string message)
    : std::runtime_error(describe(file, line, column, message)),
      file_(std::move(file)),
      line_(line),
      column_(column),
      detail_(std::move(message)) {}

KittiRecord parse_kitti_line(std::string_view text, RecordKind kind, std::size_t line_number) {
  std::vector<std::string_view> fields = split_fields(text);
  const std::size_t expected =
      kind == RecordKind::kLabel ? kLabelFieldCount : kDetectionFieldCount;
  if (fields.size() != expected) {
    throw ParseError("", line_number, 0,
                     "expected " + std::to_string(expected) + " fields for a " +
                         (kind == RecordKind::kLabel ? "label" : "detection") + ", found " +
                         std::to_string(fields.size()));
  }
  const LineParser parser(std::move(fields), line_number);
  if (kind == RecordKind::kLabel) return parse_common(parser, false);
  DetectionRecord d;
  d.object = parse_common(parser, true);
  d.score = parser.number(16, "score");
  return d;
}

LabelRecord parse_label_line(std::string_view text, std::size_t line_number) {
  return std::get<LabelRecord>(parse_kitti_line(text, RecordKind::kLabel, line_number));
}

DetectionRecord parse_detection_line(std::string_view text, std::size_t line_number) {
  return std::get<DetectionRecord>(parse_kitti_line(text, RecordKind::kDetection, line_number));
}

std::string format_kitti_line(const LabelRecord& record) { return format_common(record); }

std::string format_kitti_line(const DetectionRecord& record) {
  return format_common(record.object) + ' ' + format_shortest(record.score);
}

std::vector<LabelRecord> parse_label_file(std::string_view content, const std::string& file_name) {
  return parse_file<LabelRecord>(content, file_name, RecordKind::kLabel);
}

std::vector<DetectionRecord> parse_detection_file(std::string_view content,
                                                  const std::string& file_name) {
  return parse_file<DetectionRecord>(content, file_name, RecordKind::kDetection);
}

void apply_class_map(std::vector<LabelRecord>& records,
                     const std::map<std::string, std::string>& collapse) {
  for (LabelRecord& r : records) {
    const auto it = collapse.find(r.class_name);
    if (it != collapse.end()) r.class_name = it->second;
  }
}

void apply_class_map(std::vector<DetectionRecord>& records,
                     const std::map<std::string, std::string>& collapse) {
  for (DetectionRecord& r : records) {
    const auto it = collapse.find(r.object.class_name);
    if (it != collapse.end()) r.object.class_name = it->second;
  }
}

std::vector<DetectionRecord> suppress_dontcare(std::vector<DetectionRecord> detections,
                                               const std::vector<Box2D>& dontcare_regions,
                                               double overlap_threshold) {
  if (!(overlap_threshold > 0.0 && overlap_threshold <= 1.0)) {
    throw InvalidArgument("DontCare overlap threshold must lie in (0, 1]");
  }
  if (dontcare_regions.empty()) return detections;
  std::erase_if(detections, [&](const DetectionRecord& d) {
    const Box2D box = d.box();
    return std::any_of(dontcare_regions.begin(), dontcare_regions.end(), [&](const Box2D& region) {
      return overlap_over_area(box, region) >= overlap_threshold;
    });
  });
  return detections;
}

}  // namespace deteval
