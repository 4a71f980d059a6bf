#include "rgo/idx.hpp"

#include <cstdint>
#include <fstream>

namespace rgo {

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw IdxFormatError(path + ": truncated header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

}  // namespace

IdxDataset load_idx(const std::string& images_path, const std::string& labels_path,
                    std::size_t limit, bool downsample) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw IdxFormatError("cannot open images file: " + images_path);
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw IdxFormatError("cannot open labels file: " + labels_path);

  if (const auto magic = read_be32(img, images_path); magic != 0x00000803u)
    throw IdxFormatError(images_path + ": bad images magic " + std::to_string(magic));
  const std::size_t img_count = read_be32(img, images_path);
  const std::size_t rows = read_be32(img, images_path);
  const std::size_t cols = read_be32(img, images_path);

  if (const auto magic = read_be32(lab, labels_path); magic != 0x00000801u)
    throw IdxFormatError(labels_path + ": bad labels magic " + std::to_string(magic));
  const std::size_t lab_count = read_be32(lab, labels_path);

  if (img_count != lab_count)
    throw IdxFormatError("image/label count mismatch: " + std::to_string(img_count) + " vs " +
                         std::to_string(lab_count));
  if (downsample && (rows % 2 != 0 || cols % 2 != 0))
    throw IdxFormatError(images_path + ": downsample needs even image sides");

  const std::size_t count = std::min(limit, img_count);
  IdxDataset out;
  out.rows = downsample ? rows / 2 : rows;
  out.cols = downsample ? cols / 2 : cols;
  out.images.reserve(count);
  out.labels.reserve(count);

  std::vector<unsigned char> pixels(rows * cols);
  for (std::size_t i = 0; i < count; ++i) {
    if (!img.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size())))
      throw IdxFormatError(images_path + ": truncated at image " + std::to_string(i));
    char label_byte = 0;
    if (!lab.read(&label_byte, 1))
      throw IdxFormatError(labels_path + ": truncated at label " + std::to_string(i));

    Vector x;
    if (downsample) {
      x.resize(out.rows * out.cols);
      for (std::size_t r = 0; r < out.rows; ++r)
        for (std::size_t c = 0; c < out.cols; ++c) {
          const double sum = pixels[(2 * r) * cols + 2 * c] + pixels[(2 * r) * cols + 2 * c + 1] +
                             pixels[(2 * r + 1) * cols + 2 * c] +
                             pixels[(2 * r + 1) * cols + 2 * c + 1];
          x[r * out.cols + c] = sum / (4.0 * 255.0);
        }
    } else {
      x.resize(rows * cols);
      for (std::size_t p = 0; p < x.size(); ++p) x[p] = pixels[p] / 255.0;
    }
    out.images.push_back(std::move(x));
    out.labels.push_back(static_cast<int>(static_cast<unsigned char>(label_byte)));
  }
  return out;
}

}  // namespace rgo
