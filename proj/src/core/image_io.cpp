#include "nlos/core/image_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <opencv2/imgcodecs.hpp>
#include <vector>

#include "nlos/core/error.hpp"

namespace nlos {

static_assert(std::endian::native == std::endian::little, "raw tensors are written in native little-endian order");

double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

AlbedoMap load_texture_png(const std::filesystem::path& file, double scale) {
  cv::Mat img = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw IoError("cannot read texture " + file.string());
  const int depth = img.depth();
  if (depth != CV_8U && depth != CV_16U) throw FormatError("texture " + file.string() + " must be 8- or 16-bit");
  const double max_value = depth == CV_8U ? 255.0 : 65535.0;
  const int ch = img.channels();
  AlbedoMap map = AlbedoMap::zeros(img.rows, img.cols);
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      double bgr[4] = {0, 0, 0, 0};
      for (int k = 0; k < ch; ++k) {
        bgr[k] = depth == CV_8U ? img.ptr<std::uint8_t>(r)[c * ch + k] : img.ptr<std::uint16_t>(r)[c * ch + k];
      }
      Rgb value;
      if (ch == 1 || ch == 2) {
        value = Rgb::Constant(srgb_to_linear(bgr[0] / max_value));
      } else {
        value = {srgb_to_linear(bgr[2] / max_value), srgb_to_linear(bgr[1] / max_value),
                 srgb_to_linear(bgr[0] / max_value)};
      }
      map.at(r, c) = value * scale;
    }
  }
  return map;
}

void write_png16(const std::filesystem::path& file, const ImageD& image, double scale) {
  const int ch = image.channels();
  NLOS_REQUIRE(ch == 1 || ch == 3, "write_png16 supports 1 or 3 channels");
  cv::Mat out(image.rows(), image.cols(), ch == 1 ? CV_16UC1 : CV_16UC3);
  for (int r = 0; r < image.rows(); ++r) {
    auto* row = out.ptr<std::uint16_t>(r);
    for (int c = 0; c < image.cols(); ++c) {
      for (int k = 0; k < ch; ++k) {
        const double v = std::clamp(image(r, c, k) * scale, 0.0, 1.0);
        // OpenCV stores BGR.
        row[c * ch + (ch == 3 ? 2 - k : k)] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      }
    }
  }
  if (!cv::imwrite(file.string(), out)) throw IoError("cannot write PNG " + file.string());
}

static void to_little_endian(std::vector<float>& buf) {
  if constexpr (std::endian::native == std::endian::big) {
    for (float& f : buf) {
      auto bits = std::bit_cast<std::uint32_t>(f);
      bits = (bits >> 24) | ((bits >> 8) & 0xFF00u) | ((bits << 8) & 0xFF0000u) | (bits << 24);
      f = std::bit_cast<float>(bits);
    }
  }
}

void write_f32(const std::filesystem::path& file, const ImageD& image) {
  std::vector<float> buf(image.size());
  const auto src = image.data();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(src[i]);
  to_little_endian(buf);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw IoError("short write to " + file.string());
}

ImageD read_f32(const std::filesystem::path& file, int rows, int cols, int channels) {
  ImageD img(rows, cols, channels);
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<float> buf(img.size());
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float))) {
    throw FormatError(file.string() + ": truncated tensor at byte offset " + std::to_string(in.gcount()));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(file.string() + ": trailing bytes after offset " + std::to_string(buf.size() * sizeof(float)));
  }
  to_little_endian(buf);
  auto dst = img.data();
  for (std::size_t i = 0; i < buf.size(); ++i) dst[i] = buf[i];
  return img;
}

}  // namespace nlos
