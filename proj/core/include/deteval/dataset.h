// Frame-by-frame access to a pair of KITTI label / detection directories.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "deteval/records.h"

namespace deteval {

// Unreadable or missing input on disk.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetFingerprint {
  std::size_t file_count = 0;
  std::uintmax_t total_bytes = 0;
  std::string content_hash;  // FNV-1a 64 over names and bytes, hex

  friend bool operator==(const DatasetFingerprint&, const DatasetFingerprint&) = default;
};

// Frames are the union of `<frame_id>.txt` stems found in either directory,
// in lexicographic order. A frame without a detection file has no
// detections; one without a label file has no labels. An empty string for
// the detection directory means "no detections anywhere".
class KittiDataset {
 public:
  KittiDataset(std::filesystem::path labels_dir, std::filesystem::path detections_dir);

  std::size_t size() const { return frame_ids_.size(); }
  const std::vector<std::string>& frame_ids() const { return frame_ids_; }

  // Reads and parses one frame. Throws DataError or ParseError (with the
  // file path attached).
  FramePair load(std::size_t index) const;

  // Loads every frame; `threads` > 1 parses files concurrently. The result
  // order is the frame order regardless of thread count.
  std::vector<FramePair> load_all(std::size_t threads = 1) const;

  DatasetFingerprint fingerprint() const;

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = FramePair;
    using difference_type = std::ptrdiff_t;
    using pointer = const FramePair*;
    using reference = const FramePair&;

    iterator() = default;
    iterator(const KittiDataset* dataset, std::size_t index) : dataset_(dataset), index_(index) {}

    FramePair operator*() const { return dataset_->load(index_); }
    iterator& operator++() {
      ++index_;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++index_;
      return old;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.index_ == b.index_; }

   private:
    const KittiDataset* dataset_ = nullptr;
    std::size_t index_ = 0;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, frame_ids_.size()}; }

 private:
  std::filesystem::path labels_dir_;
  std::filesystem::path detections_dir_;
  std::vector<std::string> frame_ids_;
};

std::vector<FramePair> load_dataset(const std::filesystem::path& labels_dir,
                                    const std::filesystem::path& detections_dir,
                                    std::size_t threads = 1);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace deteval
