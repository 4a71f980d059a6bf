#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rgo/matrix.hpp"

namespace rgo {

class IdxFormatError : public std::runtime_error {
 public:
  explicit IdxFormatError(const std::string& what) : std::runtime_error(what) {}
};

struct IdxDataset {
  std::vector<Vector> images;  // pixels scaled to [0,1]
  std::vector<int> labels;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Reads the big-endian IDX pair (magic 0x00000803 for images with
// count/rows/cols dimensions, 0x00000801 for labels with a count), scales
// pixel bytes by 1/255 and keeps at most `limit` samples. With downsample
// set, 2x2 pixel blocks are averaged, halving each side. Throws
// IdxFormatError on a bad magic, a truncated file or mismatched counts.
IdxDataset load_idx(const std::string& images_path, const std::string& labels_path,
                    std::size_t limit, bool downsample = false);

}  // namespace rgo
