#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nlos/core/image.hpp"

namespace nlos {

/// Parse an IDX image container: big-endian magic 0x00000803, dimensions
/// (count, rows, cols), then one unsigned byte per pixel. Pixels map to [0, 1].
/// Throws FormatError naming the byte offset on a wrong magic, bad dimensions or truncation.
std::vector<ImageD> parse_idx_images(std::span<const std::uint8_t> bytes);

/// Throws IoError when the file cannot be read.
std::vector<ImageD> load_digit_images(const std::filesystem::path& file);

/// Serialize single-channel images of equal size, rounding to bytes.
std::vector<std::uint8_t> encode_idx_images(const std::vector<ImageD>& images);

}  // namespace nlos
