#include "deteval/report_io.h"

#include <cctype>
#include <fstream>
#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include "deteval/numeric_text.h"

namespace deteval {

using nlohmann::json;

namespace {

json num(double v) { return round_significant(v, kReportSignificantDigits); }

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json counts_json(const ConfusionCounts& c) { return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}}; }

ConfusionCounts counts_from(const json& j) {
  return {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("fn").get<std::size_t>()};
}

json thresholds_json(const std::array<double, 3>& a) { return {num(a[0]), num(a[1]), num(a[2])}; }

std::array<double, 3> thresholds_from(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json config_json(const EvalConfig& c) {
  json supports = json::array();
  for (BrierSupport s : c.brier_supports) supports.push_back(std::string(to_string(s)));
  json filters = json::array();
  for (const NamedFilter& f : c.filters) {
    filters.push_back({{"name", f.name}, {"expression", f.spec.to_string()}});
  }
  return {
      {"tau", num(c.tau)},
      {"matcher", std::string(to_string(c.matcher))},
      {"min_confidence", num(c.min_confidence)},
      {"threshold_grid", c.grid.to_string()},
      {"ap_mode", std::string(to_string(c.ap_mode))},
      {"brier_supports", supports},
      {"calibration_bins", c.calibration_bins},
      {"class_collapse", c.class_collapse},
      {"dontcare", {{"enabled", c.dontcare.enabled}, {"overlap_threshold", num(c.dontcare.overlap_threshold)}}},
      {"score_transform", std::string(to_string(c.score_transform))},
      {"difficulty_thresholds",
       {{"min_height_px", thresholds_json(c.difficulty.min_height_px)},
        {"max_occlusion", thresholds_json(c.difficulty.max_occlusion)},
        {"max_truncation", thresholds_json(c.difficulty.max_truncation)}}},
      {"classes", c.classes},
      {"filters", filters},
  };
}

EvalConfig config_from(const json& j) {
  EvalConfig c;
  c.tau = j.at("tau").get<double>();
  c.matcher = parse_matcher_kind(j.at("matcher").get<std::string>());
  c.min_confidence = j.at("min_confidence").get<double>();
  c.grid = ThresholdGrid::parse(j.at("threshold_grid").get<std::string>());
  c.ap_mode = parse_ap_mode(j.at("ap_mode").get<std::string>());
  c.brier_supports.clear();
  for (const json& s : j.at("brier_supports")) c.brier_supports.push_back(parse_brier_support(s.get<std::string>()));
  c.calibration_bins = j.at("calibration_bins").get<std::size_t>();
  c.class_collapse = j.at("class_collapse").get<std::map<std::string, std::string>>();
  c.dontcare.enabled = j.at("dontcare").at("enabled").get<bool>();
  c.dontcare.overlap_threshold = j.at("dontcare").at("overlap_threshold").get<double>();
  c.score_transform = parse_score_transform(j.at("score_transform").get<std::string>());
  const json& d = j.at("difficulty_thresholds");
  c.difficulty.min_height_px = thresholds_from(d.at("min_height_px"));
  c.difficulty.max_occlusion = thresholds_from(d.at("max_occlusion"));
  c.difficulty.max_truncation = thresholds_from(d.at("max_truncation"));
  c.classes = j.at("classes").get<std::vector<std::string>>();
  for (const json& f : j.at("filters")) {
    c.filters.push_back({f.at("name").get<std::string>(),
                         FilterSpec::parse(f.at("expression").get<std::string>())});
  }
  return c;
}

json filter_json(const FilterReport& f) {
  json brier = json::object();
  for (const auto& [support, value] : f.brier) brier[std::string(to_string(support))] = opt_num(value);
  json curve = json::array();
  for (const CurvePoint& p : f.curve.points) {
    curve.push_back({{"threshold", num(p.threshold)},
                     {"tp", p.tp},
                     {"fp", p.fp},
                     {"fn", p.fn},
                     {"precision", num(p.precision)},
                     {"recall", num(p.recall)},
                     {"fp_per_frame", num(p.fp_per_frame)}});
  }
  json bins = json::array();
  for (const CalibrationBin& b : f.calibration) {
    bins.push_back({{"lower", num(b.lower)},
                    {"upper", num(b.upper)},
                    {"center", num(b.center)},
                    {"count", b.count},
                    {"mean_confidence", opt_num(b.mean_confidence)},
                    {"empirical_precision", opt_num(b.empirical_precision)}});
  }
  return {{"filter", f.expression},
          {"counts", counts_json(f.counts)},
          {"ap", num(f.ap)},
          {"brier", brier},
          {"calibration_l2", opt_num(f.calibration_l2)},
          {"curve", curve},
          {"recall_violations", f.curve.recall_violations},
          {"calibration", bins}};
}

FilterReport filter_from(const json& j) {
  FilterReport f;
  f.expression = j.at("filter").get<std::string>();
  f.counts = counts_from(j.at("counts"));
  f.ap = j.at("ap").get<double>();
  for (const auto& [key, value] : j.at("brier").items()) f.brier[parse_brier_support(key)] = get_opt(value);
  f.calibration_l2 = get_opt(j.at("calibration_l2"));
  for (const json& p : j.at("curve")) {
    CurvePoint c;
    c.threshold = p.at("threshold").get<double>();
    c.tp = p.at("tp").get<std::size_t>();
    c.fp = p.at("fp").get<std::size_t>();
    c.fn = p.at("fn").get<std::size_t>();
    c.precision = p.at("precision").get<double>();
    c.recall = p.at("recall").get<double>();
    c.fp_per_frame = p.at("fp_per_frame").get<double>();
    f.curve.points.push_back(c);
  }
  f.curve.recall_violations = j.at("recall_violations").get<std::size_t>();
  for (const json& b : j.at("calibration")) {
    CalibrationBin bin;
    bin.lower = b.at("lower").get<double>();
    bin.upper = b.at("upper").get<double>();
    bin.center = b.at("center").get<double>();
    bin.count = b.at("count").get<std::size_t>();
    bin.mean_confidence = get_opt(b.at("mean_confidence"));
    bin.empirical_precision = get_opt(b.at("empirical_precision"));
    f.calibration.push_back(bin);
  }
  return f;
}

json report_json(const EvalReport& r) {
  json classes = json::object();
  for (const auto& [name, cls] : r.classes) {
    json filters = json::object();
    for (const auto& [fname, f] : cls.filters) filters[fname] = filter_json(f);
    classes[name] = {{"frames", cls.num_frames},
                     {"labels", cls.num_labels},
                     {"detections", cls.num_detections},
                     {"filters", filters}};
  }
  const RunManifest& m = r.manifest;
  json out = {
      {"config", config_json(r.config)},
      {"manifest",
       {{"command_line", m.command_line},
        {"tool_version", m.tool_version},
        {"dataset",
         {{"file_count", m.dataset.file_count},
          {"total_bytes", m.dataset.total_bytes},
          {"content_hash", m.dataset.content_hash}}},
        {"wall_time_seconds", num(m.wall_time_seconds)}}},
      {"classes", classes},
  };
  if (r.calibration_refused) out["calibration_refused"] = *r.calibration_refused;
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw DataError("failed writing " + path.string());
}

std::string csv_num(double v) { return format_significant(v, kReportSignificantDigits); }
std::string csv_opt(const std::optional<double>& v) { return v ? csv_num(*v) : std::string(); }

std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "csv") return ReportFormat::kCsv;
  throw InvalidArgument("unknown report format '" + std::string(text) + "' (expected json or csv)");
}

std::string report_to_json_text(const EvalReport& report, int indent) {
  return report_json(report).dump(indent) + "\n";
}

std::string config_to_json_text(const EvalConfig& config) { return config_json(config).dump(2); }

EvalReport report_from_json_text(std::string_view text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.config = config_from(j.at("config"));
    const json& m = j.at("manifest");
    r.manifest.command_line = m.at("command_line").get<std::string>();
    r.manifest.tool_version = m.at("tool_version").get<std::string>();
    r.manifest.dataset.file_count = m.at("dataset").at("file_count").get<std::size_t>();
    r.manifest.dataset.total_bytes = m.at("dataset").at("total_bytes").get<std::uintmax_t>();
    r.manifest.dataset.content_hash = m.at("dataset").at("content_hash").get<std::string>();
    r.manifest.wall_time_seconds = m.at("wall_time_seconds").get<double>();
    if (j.contains("calibration_refused")) {
      r.calibration_refused = j.at("calibration_refused").get<std::string>();
    }
    for (const auto& [name, cls] : j.at("classes").items()) {
      ClassReport c;
      c.num_frames = cls.at("frames").get<std::size_t>();
      c.num_labels = cls.at("labels").get<std::size_t>();
      c.num_detections = cls.at("detections").get<std::size_t>();
      for (const auto& [fname, f] : cls.at("filters").items()) c.filters.emplace(fname, filter_from(f));
      r.classes.emplace(name, std::move(c));
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed report JSON: ") + e.what());
  }
}

std::string sanitize_file_component(std::string_view name) {
  std::string out;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    out += (std::isalnum(u) || c == '-' || c == '_') ? c : '_';
  }
  return out.empty() ? "_" : out;
}

void write_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    write_file(path, report_to_json_text(report));
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw DataError("cannot create directory " + path.string() + ": " + ec.message());

  std::string summary =
      "class,filter,tp,fp,fn,ap,brier_labels,brier_detections,brier_union,calibration_l2\n";
  for (const auto& [cls_name, cls] : report.classes) {
    for (const auto& [filter_name, f] : cls.filters) {
      auto brier = [&](BrierSupport s) {
        const auto it = f.brier.find(s);
        return it == f.brier.end() ? std::string() : csv_opt(it->second);
      };
      summary += csv_quote(cls_name) + ',' + csv_quote(filter_name) + ',' +
                 std::to_string(f.counts.tp) + ',' + std::to_string(f.counts.fp) + ',' +
                 std::to_string(f.counts.fn) + ',' + csv_num(f.ap) + ',' +
                 brier(BrierSupport::kLabels) + ',' + brier(BrierSupport::kDetections) + ',' +
                 brier(BrierSupport::kUnion) + ',' + csv_opt(f.calibration_l2) + '\n';

      const std::string stem =
          sanitize_file_component(cls_name) + '.' + sanitize_file_component(filter_name);
      std::string pr = "threshold,tp,fp,fn,precision,recall,fp_per_frame\n";
      std::string roc = "threshold,fp_per_frame,recall\n";
      for (const CurvePoint& p : f.curve.points) {
        pr += csv_num(p.threshold) + ',' + std::to_string(p.tp) + ',' + std::to_string(p.fp) + ',' +
              std::to_string(p.fn) + ',' + csv_num(p.precision) + ',' + csv_num(p.recall) + ',' +
              csv_num(p.fp_per_frame) + '\n';
        roc += csv_num(p.threshold) + ',' + csv_num(p.fp_per_frame) + ',' + csv_num(p.recall) + '\n';
      }
      write_file(path / (stem + ".pr.csv"), pr);
      write_file(path / (stem + ".roc.csv"), roc);

      std::string cal = "lower,upper,center,count,mean_confidence,empirical_precision\n";
      for (const CalibrationBin& b : f.calibration) {
        cal += csv_num(b.lower) + ',' + csv_num(b.upper) + ',' + csv_num(b.center) + ',' +
               std::to_string(b.count) + ',' + csv_opt(b.mean_confidence) + ',' +
               csv_opt(b.empirical_precision) + '\n';
      }
      write_file(path / (stem + ".calibration.csv"), cal);
    }
  }
  write_file(path / "summary.csv", summary);
}

}  // namespace deteval
