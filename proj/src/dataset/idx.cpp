#include "nlos/dataset/idx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "nlos/core/error.hpp"

namespace nlos {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what) {
  if (bytes.size() < offset + 4) {
    throw FormatError("IDX truncated at offset " + std::to_string(bytes.size()) + " while reading " + what +
                      " at offset " + std::to_string(offset));
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

}  // namespace

std::vector<ImageD> parse_idx_images(std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = read_be32(bytes, 0, "magic");
  if (magic != kImageMagic) {
    char hex[16];
    std::snprintf(hex, sizeof hex, "0x%08X", magic);
    throw FormatError(std::string("IDX magic ") + hex + " at offset 0 is not an unsigned-byte image file (0x00000803)");
  }
  const std::uint32_t count = read_be32(bytes, 4, "image count");
  const std::uint32_t rows = read_be32(bytes, 8, "row count");
  const std::uint32_t cols = read_be32(bytes, 12, "column count");
  if (rows == 0 || cols == 0 || rows > 65536 || cols > 65536) {
    throw FormatError("IDX image dimensions " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " at offset 8 are invalid");
  }
  const std::size_t pixels = std::size_t{rows} * cols;
  const std::size_t expected = 16 + std::size_t{count} * pixels;
  if (bytes.size() < expected) {
    throw FormatError("IDX truncated at offset " + std::to_string(bytes.size()) + ": header declares " +
                      std::to_string(count) + " images needing " + std::to_string(expected) + " bytes");
  }
  std::vector<ImageD> images;
  images.reserve(count);
  std::size_t offset = 16;
  for (std::uint32_t k = 0; k < count; ++k) {
    ImageD img(static_cast<int>(rows), static_cast<int>(cols), 1);
    for (std::size_t p = 0; p < pixels; ++p) img.storage()[p] = bytes[offset + p] / 255.0;
    offset += pixels;
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<ImageD> load_digit_images(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open IDX file " + file.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_idx_images(bytes);
  } catch (const FormatError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_idx_images(const std::vector<ImageD>& images) {
  NLOS_REQUIRE(!images.empty(), "encode_idx_images: no images");
  const int rows = images.front().rows();
  const int cols = images.front().cols();
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.size() * static_cast<std::size_t>(rows) * cols);
  write_be32(out, kImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.size()));
  write_be32(out, static_cast<std::uint32_t>(rows));
  write_be32(out, static_cast<std::uint32_t>(cols));
  for (const ImageD& img : images) {
    NLOS_REQUIRE(img.rows() == rows && img.cols() == cols && img.channels() == 1,
                 "encode_idx_images: images must share one single-channel size");
    for (double v : img.data()) {
      out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    }
  }
  return out;
}

}  // namespace nlos
