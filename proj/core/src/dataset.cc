#include "deteval/dataset.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "deteval/kitti.h"
#include "deteval/parallel.h"

namespace deteval {
namespace fs = std::filesystem;

namespace {

std::set<std::string> list_stems(const fs::path& dir) {
  std::set<std::string> stems;
  if (dir.empty()) return stems;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DataError("not a directory: " + dir.string());
  for (const fs::directory_entry& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      stems.insert(entry.path().stem().string());
    }
  }
  if (ec) throw DataError("cannot list " + dir.string() + ": " + ec.message());
  return stems;
}

struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ULL;
  void add(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state ^= c;
      state *= 0x100000001b3ULL;
    }
  }
};

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("cannot read " + path.string());
  return buf.str();
}

KittiDataset::KittiDataset(fs::path labels_dir, fs::path detections_dir)
    : labels_dir_(std::move(labels_dir)), detections_dir_(std::move(detections_dir)) {
  std::set<std::string> stems = list_stems(labels_dir_);
  stems.merge(list_stems(detections_dir_));
  frame_ids_.assign(stems.begin(), stems.end());
}

FramePair KittiDataset::load(std::size_t index) const {
  FramePair frame;
  frame.frame_id = frame_ids_.at(index);
  const std::string file = frame.frame_id + ".txt";
  const fs::path label_path = labels_dir_ / file;
  if (!labels_dir_.empty() && fs::exists(label_path)) {
    frame.labels = parse_label_file(read_text_file(label_path), label_path.string());
  }
  if (!detections_dir_.empty()) {
    const fs::path det_path = detections_dir_ / file;
    if (fs::exists(det_path)) {
      frame.detections = parse_detection_file(read_text_file(det_path), det_path.string());
    }
  }
  return frame;
}

std::vector<FramePair> KittiDataset::load_all(std::size_t threads) const {
  std::vector<FramePair> frames(size());
  parallel_for(size(), threads, [&](std::size_t i) { frames[i] = load(i); });
  return frames;
}

DatasetFingerprint KittiDataset::fingerprint() const {
  DatasetFingerprint fp;
  Fnv1a hash;
  for (const auto& [tag, dir] : {std::pair{"labels", &labels_dir_}, {"detections", &detections_dir_}}) {
    if (dir->empty()) continue;
    for (const std::string& id : frame_ids_) {
      const fs::path path = *dir / (id + ".txt");
      if (!fs::exists(path)) continue;
      const std::string bytes = read_text_file(path);
      ++fp.file_count;
      fp.total_bytes += bytes.size();
      hash.add(tag);
      hash.add("/");
      hash.add(id);
      hash.add(std::string_view("\0", 1));
      hash.add(bytes);
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash.state));
  fp.content_hash = hex;
  return fp;
}

std::vector<FramePair> load_dataset(const fs::path& labels_dir, const fs::path& detections_dir,
                                    std::size_t threads) {
  return KittiDataset(labels_dir, detections_dir).load_all(threads);
}

}  // namespace deteval
