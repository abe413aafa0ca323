#include "cli.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "deteval/dataset.h"
#include "deteval/evaluate.h"
#include "deteval/filters.h"
#include "deteval/kitti.h"
#include "deteval/numeric_text.h"
#include "deteval/report_io.h"
#include "deteval/scenario.h"

namespace deteval::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalOptions {
  std::string labels;
  std::string detections;
  double iou = 0.7;
  std::string matcher = "optimal";
  std::vector<std::string> classes;
  std::vector<std::string> collapse;
  std::vector<std::string> difficulty;
  std::vector<std::string> filters;
  std::string ap_mode = "all-points";
  std::vector<std::string> brier_supports;
  double min_confidence = 0.0;
  std::string grid = "unique";
  std::string score_transform = "none";
  std::size_t calibration_bins = 10;
  std::string dontcare = "on";
  double dontcare_overlap = 0.5;
  std::vector<double> min_height;
  std::vector<double> max_occlusion;
  std::vector<double> max_truncation;
  std::string out;
  std::string format = "json";
  std::size_t threads = 1;
  std::string config;
};

struct SweepOptions {
  std::string attribute = "area";
  std::string side = "both";
  double from = 0.0;
  double to = 0.0;
  std::size_t steps = 11;
};

struct FuzzOptions {
  std::size_t seeds = 1000;
  double tau = 0.5;
  double bias = 0.5;
  std::uint64_t seed = 1;
  std::size_t max_boxes = 7;
  std::size_t witnesses = 3;
  std::string out;
  std::string config;
};

void add_dataset_options(CLI::App& cmd, EvalOptions& o) {
  cmd.add_option("--labels", o.labels, "Directory of KITTI label files")->required();
  cmd.add_option("--detections", o.detections, "Directory of KITTI result files")->required();
  cmd.add_option("--iou", o.iou, "IoU threshold tau in (0, 1]")->capture_default_str();
  cmd.add_option("--matcher", o.matcher, "optimal | greedy | brute-force")->capture_default_str();
  cmd.add_option("--class", o.classes, "Class to evaluate (repeatable; default: all)");
  cmd.add_option("--collapse", o.collapse, "Class rename A=B (repeatable)");
  cmd.add_option("--min-confidence", o.min_confidence, "Ignore detections below this score")
      ->capture_default_str();
  cmd.add_option("--dontcare", o.dontcare, "Suppress detections inside DontCare regions")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  cmd.add_option("--dontcare-overlap", o.dontcare_overlap,
                 "Fraction of a detection inside a DontCare region that suppresses it")
      ->capture_default_str();
  cmd.add_option("--threads", o.threads, "Worker threads (0: hardware concurrency)")
      ->capture_default_str();
  cmd.add_option("--config", o.config, "key=value file of defaults");
}

void add_eval_options(CLI::App& cmd, EvalOptions& o) {
  add_dataset_options(cmd, o);
  cmd.add_option("--difficulty", o.difficulty, "easy | medium | hard (repeatable)");
  cmd.add_option("--filter", o.filters, "[NAME:]EXPR, e.g. 'small:label.area < 1600' (repeatable)");
  cmd.add_option("--ap-mode", o.ap_mode, "all-points | eleven-point (11) | forty-one-point (41)")->capture_default_str();
  cmd.add_option("--brier-support", o.brier_supports,
                 "labels | detections | union (repeatable; default: all three)");
  cmd.add_option("--grid", o.grid, "unique | unique:CAP | fixed:N")->capture_default_str();
  cmd.add_option("--score-transform", o.score_transform, "none | sigmoid | minmax")
      ->capture_default_str();
  cmd.add_option("--calibration-bins", o.calibration_bins, "Equal-width calibration bins")
      ->capture_default_str();
  cmd.add_option("--difficulty-min-height", o.min_height, "easy,medium,hard minimum height (px)")
      ->delimiter(',')
      ->expected(3);
  cmd.add_option("--difficulty-max-occlusion", o.max_occlusion, "easy,medium,hard occlusion bound")
      ->delimiter(',')
      ->expected(3);
  cmd.add_option("--difficulty-max-truncation", o.max_truncation,
                 "easy,medium,hard truncation bound")
      ->delimiter(',')
      ->expected(3);
  cmd.add_option("--out", o.out, "Output path (JSON file or CSV directory)");
  cmd.add_option("--format", o.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

std::array<double, 3> to_array(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

// Converts flag values into an EvalConfig. Every failure is a usage error.
EvalConfig build_config(const EvalOptions& o) {
  try {
    EvalConfig c;
    c.tau = o.iou;
    c.matcher = parse_matcher_kind(o.matcher);
    c.min_confidence = o.min_confidence;
    c.grid = ThresholdGrid::parse(o.grid);
    c.ap_mode = parse_ap_mode(o.ap_mode);
    if (!o.brier_supports.empty()) {
      c.brier_supports.clear();
      for (const std::string& s : o.brier_supports) {
        const BrierSupport support = parse_brier_support(s);
        if (std::find(c.brier_supports.begin(), c.brier_supports.end(), support) ==
            c.brier_supports.end()) {
          c.brier_supports.push_back(support);
        }
      }
    }
    c.calibration_bins = o.calibration_bins;
    for (const std::string& entry : o.collapse) {
      const std::size_t eq = entry.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
        throw UsageError("--collapse expects FROM=TO, got '" + entry + "'");
      }
      c.class_collapse[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    c.dontcare.enabled = o.dontcare == "on";
    c.dontcare.overlap_threshold = o.dontcare_overlap;
    c.score_transform = parse_score_transform(o.score_transform);
    if (!o.min_height.empty()) c.difficulty.min_height_px = to_array(o.min_height);
    if (!o.max_occlusion.empty()) c.difficulty.max_occlusion = to_array(o.max_occlusion);
    if (!o.max_truncation.empty()) c.difficulty.max_truncation = to_array(o.max_truncation);
    c.classes = o.classes;
    for (const std::string& d : o.difficulty) {
      const Difficulty level = parse_difficulty(d);
      c.filters.push_back({std::string(to_string(level)), difficulty_filter(level, c.difficulty)});
    }
    for (const std::string& f : o.filters) {
      const std::size_t colon = f.find(':');
      if (colon == std::string::npos) {
        const FilterSpec spec = FilterSpec::parse(f);
        c.filters.push_back({spec.to_string(), spec});
      } else {
        c.filters.push_back({f.substr(0, colon), FilterSpec::parse(f.substr(colon + 1))});
      }
    }
    c.validate();
    std::set<std::string> names{kUnfilteredName};
    for (const NamedFilter& f : c.filters) {
      if (!names.insert(f.name).second) throw UsageError("duplicate filter name '" + f.name + "'");
    }
    return c;
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::string quote_arg(const std::string& arg) {
  if (!arg.empty() && arg.find_first_of(" \t\"'\\") == std::string::npos) return arg;
  std::string q = "'";
  for (char ch : arg) {
    if (ch == '\'') {
      q += "'\\''";
    } else {
      q += ch;
    }
  }
  return q + "'";
}

std::string join_command_line(const std::vector<std::string>& args) {
  std::string line = "deteval";
  for (const std::string& a : args) line += " " + quote_arg(a);
  return line;
}

struct LoadedData {
  std::vector<FramePair> frames;
  DatasetFingerprint fingerprint;
};

LoadedData load(const EvalOptions& o) {
  const KittiDataset dataset(o.labels, o.detections);
  LoadedData data;
  data.fingerprint = dataset.fingerprint();
  data.frames = dataset.load_all(resolve_threads(o.threads));
  return data;
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  f << text;
  if (!f) throw DataError("cannot write " + path);
}

int cmd_evaluate(const EvalOptions& o, const std::vector<std::string>& args, std::ostream& out,
                 bool curves) {
  const EvalConfig config = build_config(o);
  const ReportFormat format = parse_report_format(o.format);
  if (format == ReportFormat::kCsv && o.out.empty()) {
    throw UsageError("--format csv writes a directory; --out is required");
  }
  const auto start = std::chrono::steady_clock::now();
  LoadedData data = load(o);
  EvalReport report = evaluate(std::move(data.frames), config, resolve_threads(o.threads));
  report.manifest.command_line = join_command_line(args);
  report.manifest.dataset = data.fingerprint;
  report.manifest.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (o.out.empty()) {
    out << report_to_json_text(report) << "\n";
    return kExitOk;
  }
  write_report(report, o.out, format);
  if (curves) {
    for (const auto& [cls, cr] : report.classes) {
      for (const auto& [name, fr] : cr.filters) {
        out << cls << " " << name << ": " << fr.curve.points.size() << " curve points, "
            << fr.calibration.size() << " calibration bins\n";
      }
    }
  }
  if (report.calibration_refused) out << "note: " << *report.calibration_refused << "\n";
  return kExitOk;
}

std::string describe_matching(const Matching& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.pairs.size(); ++i) {
    if (i > 0) s += ", ";
    s += "d" + std::to_string(m.pairs[i].detection) + "-l" + std::to_string(m.pairs[i].label) +
         " " + format_significant(m.pairs[i].iou, 4);
  }
  return s + "]";
}

std::string describe_counts(const ConfusionCounts& c) {
  return "tp=" + std::to_string(c.tp) + " fp=" + std::to_string(c.fp) +
         " fn=" + std::to_string(c.fn);
}

std::vector<DetectionRecord> above_cut(const std::vector<DetectionRecord>& dets, double cut) {
  std::vector<DetectionRecord> kept;
  for (const DetectionRecord& d : dets) {
    if (d.score >= cut) kept.push_back(d);
  }
  return kept;
}

int cmd_compare(const EvalOptions& o, std::ostream& out) {
  const EvalConfig config = build_config(o);
  LoadedData data = load(o);
  normalize_frames(data.frames, config);

  std::set<std::string> disagreeing_frames;
  std::size_t units = 0;
  std::size_t disagreements = 0;
  for (const std::string& cls : evaluation_classes(data.frames, config)) {
    for (const FramePair& f : frames_for_class(data.frames, cls, config)) {
      const std::vector<DetectionRecord> dets = above_cut(f.detections, config.min_confidence);
      const Matching greedy = match_records(dets, f.labels, config.tau, MatcherKind::kGreedyConfidence);
      const Matching optimal = match_records(dets, f.labels, config.tau, MatcherKind::kOptimal);
      ++units;
      if (greedy.pairs.size() == optimal.pairs.size()) continue;
      ++disagreements;
      disagreeing_frames.insert(f.frame_id);
      out << "frame " << f.frame_id << " class " << cls << ": greedy "
          << describe_counts(counts_from_matching(greedy)) << " " << describe_matching(greedy)
          << " | optimal " << describe_counts(counts_from_matching(optimal)) << " "
          << describe_matching(optimal) << "\n";
    }
  }
  const double rate = units == 0 ? 0.0 : static_cast<double>(disagreements) / units;
  out << "summary: " << disagreements << " of " << units
      << " frame-class evaluations disagree in TP count (rate " << format_significant(rate, 6)
      << "), " << disagreeing_frames.size() << " of " << data.frames.size() << " frames\n";
  return kExitOk;
}

double precision_of(const ConfusionCounts& c) {
  return c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall_of(const ConfusionCounts& c) {
  return c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

int cmd_sweep_filter(const EvalOptions& o, const SweepOptions& s, std::ostream& out) {
  const EvalConfig config = build_config(o);
  if (s.steps == 0) throw UsageError("--steps must be at least 1");
  if (!(s.from <= s.to)) throw UsageError("--from must not exceed --to");
  const std::string prefix = s.side + "." + s.attribute + " >= ";
  try {
    FilterSpec::parse(prefix + "0");
  } catch (const FilterError& e) {
    throw UsageError(e.what());
  }
  LoadedData data = load(o);
  normalize_frames(data.frames, config);

  std::vector<double> values;
  for (std::size_t k = 0; k < s.steps; ++k) {
    values.push_back(s.steps == 1 ? s.from
                                  : s.from + (s.to - s.from) * static_cast<double>(k) /
                                                 static_cast<double>(s.steps - 1));
  }

  std::ostringstream csv;
  csv << "class,filter,value,stable_tp,stable_fp,stable_fn,stable_precision,stable_recall,"
         "naive_tp,naive_fp,naive_fn,naive_precision,naive_recall\n";
  std::size_t points = 0;
  std::size_t stable_not_worse = 0;
  for (const std::string& cls : evaluation_classes(data.frames, config)) {
    const std::vector<FramePair> frames = frames_for_class(data.frames, cls, config);
    std::vector<PairSet> pair_sets;
    std::vector<std::vector<DetectionRecord>> kept;
    for (const FramePair& f : frames) {
      kept.push_back(above_cut(f.detections, config.min_confidence));
      pair_sets.push_back(build_pair_set(
          match_records(kept.back(), f.labels, config.tau, config.matcher), kept.back(), f.labels,
          config.tau));
    }
    for (double v : values) {
      const FilterSpec filter = FilterSpec::parse(prefix + format_shortest(v));
      ConfusionCounts stable;
      ConfusionCounts naive;
      for (std::size_t i = 0; i < frames.size(); ++i) {
        stable += filtered_counts(pair_sets[i], filter);
        naive += naive_filtered_counts(kept[i], frames[i].labels, filter, config.tau, config.matcher);
      }
      ++points;
      if (precision_of(stable) >= precision_of(naive)) ++stable_not_worse;
      csv << cls << ',' << filter.to_string() << ',' << format_significant(v, 9) << ','
          << stable.tp << ',' << stable.fp << ',' << stable.fn << ','
          << format_significant(precision_of(stable), 9) << ','
          << format_significant(recall_of(stable), 9) << ',' << naive.tp << ',' << naive.fp << ','
          << naive.fn << ',' << format_significant(precision_of(naive), 9) << ','
          << format_significant(recall_of(naive), 9) << '\n';
    }
  }
  const double fraction = points == 0 ? 0.0 : static_cast<double>(stable_not_worse) / points;
  const std::string summary = "stable precision >= naive precision at " +
                              std::to_string(stable_not_worse) + " of " + std::to_string(points) +
                              " sweep points (fraction " + format_significant(fraction, 6) + ")";
  if (o.out.empty()) {
    out << csv.str() << "# " << summary << "\n";
  } else {
    write_text(o.out, csv.str());
    out << summary << "\n";
  }
  return kExitOk;
}

struct Witness {
  std::uint64_t seed = 0;
  std::size_t size = 0;
  Scenario scenario;
  std::string note;
};

void keep_smallest(std::vector<Witness>& kept, Witness w, std::size_t limit) {
  kept.push_back(std::move(w));
  std::stable_sort(kept.begin(), kept.end(), [](const Witness& a, const Witness& b) {
    return a.size != b.size ? a.size < b.size : a.seed < b.seed;
  });
  if (kept.size() > limit) kept.pop_back();
}

std::string kitti_text(const Scenario& s, bool labels) {
  std::string text;
  if (labels) {
    for (const LabelRecord& l : s.labels) text += format_kitti_line(l) + "\n";
  } else {
    for (const DetectionRecord& d : s.detections) text += format_kitti_line(d) + "\n";
  }
  return text;
}

void write_witnesses(const fs::path& root, const std::string& kind,
                     const std::vector<Witness>& witnesses) {
  for (const Witness& w : witnesses) {
    const fs::path dir = root / (kind + "-" + std::to_string(w.seed));
    write_text((dir / "labels" / "000000.txt").string(), kitti_text(w.scenario, true));
    write_text((dir / "detections" / "000000.txt").string(), kitti_text(w.scenario, false));
    write_text((dir / "NOTE.txt").string(), w.note + "\n");
  }
}

// Searches the area thresholds of a scenario's own boxes for a filter under
// which striking and re-matching reports more FPs or FNs than the unfiltered
// evaluation. Returns the filter text of the first one found.
std::optional<std::string> find_instability(const Scenario& s, double tau,
                                            std::size_t& stable_violations) {
  const ConfusionCounts unfiltered =
      counts_from_matching(match_records(s.detections, s.labels, tau, MatcherKind::kOptimal));
  const PairSet pairs = build_pair_set(
      match_records(s.detections, s.labels, tau, MatcherKind::kOptimal), s.detections, s.labels, tau);
  std::set<double> areas;
  for (const LabelRecord& l : s.labels) areas.insert(l.box().area());
  for (const DetectionRecord& d : s.detections) areas.insert(d.box().area());
  std::optional<std::string> found;
  for (double a : areas) {
    const FilterSpec filter = FilterSpec::parse("both.area >= " + format_shortest(a));
    const ConfusionCounts stable = filtered_counts(pairs, filter);
    if (stable.tp > unfiltered.tp || stable.fp > unfiltered.fp || stable.fn > unfiltered.fn) {
      ++stable_violations;
    }
    if (found) continue;
    const ConfusionCounts naive =
        naive_filtered_counts(s.detections, s.labels, filter, tau, MatcherKind::kOptimal);
    if (naive.fp > unfiltered.fp || naive.fn > unfiltered.fn) found = filter.to_string();
  }
  return found;
}

int cmd_fuzz(const FuzzOptions& o, std::ostream& out) {
  if (!(o.tau > 0.0 && o.tau <= 1.0)) throw UsageError("--tau must lie in (0, 1]");
  ScenarioParams params;
  params.overlap_bias = o.bias;
  params.max_detections = o.max_boxes;
  params.max_labels = o.max_boxes;
  try {
    params.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }

  std::size_t disagreements = 0;
  std::size_t instabilities = 0;
  std::size_t stable_violations = 0;
  std::vector<Witness> disagreement_witnesses;
  std::vector<Witness> instability_witnesses;
  for (std::size_t i = 0; i < o.seeds; ++i) {
    const std::uint64_t seed = o.seed + i;
    Scenario s = generate_scenario(seed, params);
    const std::size_t size = s.detections.size() + s.labels.size();
    const Matching greedy = match_records(s.detections, s.labels, o.tau, MatcherKind::kGreedyConfidence);
    const Matching optimal = match_records(s.detections, s.labels, o.tau, MatcherKind::kOptimal);
    if (greedy.pairs.size() != optimal.pairs.size()) {
      ++disagreements;
      keep_smallest(disagreement_witnesses,
                    {seed, size, s,
                     "greedy " + describe_counts(counts_from_matching(greedy)) + ", optimal " +
                         describe_counts(counts_from_matching(optimal)) + ", tau " +
                         format_shortest(o.tau)},
                    o.witnesses);
    }
    if (std::optional<std::string> filter = find_instability(s, o.tau, stable_violations)) {
      ++instabilities;
      keep_smallest(instability_witnesses,
                    {seed, size, s, "filter " + *filter + ", tau " + format_shortest(o.tau)},
                    o.witnesses);
    }
  }

  const auto rate = [&](std::size_t k) {
    return format_significant(o.seeds == 0 ? 0.0 : static_cast<double>(k) / o.seeds, 6);
  };
  out << "scenarios: " << o.seeds << " (seeds " << o.seed << ".." << o.seed + o.seeds << ")\n"
      << "tau: " << format_shortest(o.tau) << "  bias: " << format_shortest(o.bias)
      << "  max boxes: " << o.max_boxes << "\n"
      << "greedy/optimal TP disagreements: " << disagreements << " (rate " << rate(disagreements)
      << ")\n"
      << "naive filtering instability witnesses: " << instabilities << " (rate "
      << rate(instabilities) << ")\n"
      << "stable filtering violations: " << stable_violations << "\n";
  for (const Witness& w : disagreement_witnesses) {
    out << "disagreement witness: seed " << w.seed << " (" << w.scenario.detections.size()
        << " detections, " << w.scenario.labels.size() << " labels) " << w.note << "\n";
  }
  for (const Witness& w : instability_witnesses) {
    out << "instability witness: seed " << w.seed << " (" << w.scenario.detections.size()
        << " detections, " << w.scenario.labels.size() << " labels) " << w.note << "\n";
  }
  if (!o.out.empty()) {
    write_witnesses(o.out, "disagreement", disagreement_witnesses);
    write_witnesses(o.out, "instability", instability_witnesses);
  }
  return kExitOk;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> expand_config_file(const std::string& path,
                                            const std::vector<std::string>& explicit_args) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || key == "config") {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": invalid key '" + key + "'");
    }
    if (has_flag(explicit_args, "--" + key)) continue;
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detection evaluation with optimal association and stable filtering", "deteval"};
  app.set_version_flag("--version", std::string(engine_version()));
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  EvalOptions eval_opts;
  SweepOptions sweep_opts;
  FuzzOptions fuzz_opts;

  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate detections against labels");
  add_eval_options(*evaluate_cmd, eval_opts);

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "List frames where greedy and optimal matching disagree");
  add_dataset_options(*compare_cmd, eval_opts);

  CLI::App* curves_cmd = app.add_subcommand("curves", "Export PR, ROC and calibration curves");
  add_eval_options(*curves_cmd, eval_opts);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep-filter", "Compare stable and naive filtering across a threshold");
  add_eval_options(*sweep_cmd, eval_opts);
  sweep_cmd->add_option("--attribute", sweep_opts.attribute, "area | width | height_px")
      ->check(CLI::IsMember({"area", "width", "height_px"}))
      ->capture_default_str();
  sweep_cmd->add_option("--side", sweep_opts.side, "both | label | detection")
      ->check(CLI::IsMember({"both", "label", "detection"}))
      ->capture_default_str();
  sweep_cmd->add_option("--from", sweep_opts.from, "First threshold")->required();
  sweep_cmd->add_option("--to", sweep_opts.to, "Last threshold")->required();
  sweep_cmd->add_option("--steps", sweep_opts.steps, "Number of thresholds")->capture_default_str();

  CLI::App* fuzz_cmd = app.add_subcommand("fuzz", "Search random scenarios for counterexamples");
  fuzz_cmd->add_option("--seeds", fuzz_opts.seeds, "Number of scenarios")->capture_default_str();
  fuzz_cmd->add_option("--seed", fuzz_opts.seed, "First scenario seed")->capture_default_str();
  fuzz_cmd->add_option("--tau", fuzz_opts.tau, "IoU threshold")->capture_default_str();
  fuzz_cmd->add_option("--bias", fuzz_opts.bias, "Overlap bias in [0, 1]")->capture_default_str();
  fuzz_cmd->add_option("--max-boxes", fuzz_opts.max_boxes, "Maximum detections and labels")
      ->capture_default_str();
  fuzz_cmd->add_option("--witnesses", fuzz_opts.witnesses, "Witnesses kept per kind")
      ->capture_default_str();
  fuzz_cmd->add_option("--out", fuzz_opts.out, "Directory for witness fixtures");
  fuzz_cmd->add_option("--config", fuzz_opts.config, "key=value file of defaults");

  std::vector<std::string> args = raw_args;
  try {
    if (!args.empty()) {
      if (std::optional<std::string> path = config_path(args)) {
        std::vector<std::string> extra = expand_config_file(*path, args);
        args.insert(args.begin() + 1, extra.begin(), extra.end());
      }
    }
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<std::string> argv_storage{"deteval"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (evaluate_cmd->parsed()) return cmd_evaluate(eval_opts, args, out, false);
    if (curves_cmd->parsed()) {
      if (curves_cmd->count("--format") == 0) eval_opts.format = "csv";
      return cmd_evaluate(eval_opts, args, out, true);
    }
    if (compare_cmd->parsed()) return cmd_compare(eval_opts, out);
    if (sweep_cmd->parsed()) return cmd_sweep_filter(eval_opts, sweep_opts, out);
    if (fuzz_cmd->parsed()) return cmd_fuzz(fuzz_opts, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace deteval::cli
