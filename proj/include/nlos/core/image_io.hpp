#pragma once

#include <filesystem>

#include "nlos/core/image.hpp"
#include "nlos/core/material.hpp"

namespace nlos {

/// Load an 8- or 16-bit PNG texture, decoding sRGB to linear [0, 1].
AlbedoMap load_texture_png(const std::filesystem::path& file, double scale = 1.0);

/// Write a 16-bit PNG: stored = round(clamp(value * scale, 0, 1) * 65535).
/// 1- and 3-channel images are supported.
void write_png16(const std::filesystem::path& file, const ImageD& image, double scale);

/// Raw little-endian float32 tensor in row-major (rows, cols, channels) order.
void write_f32(const std::filesystem::path& file, const ImageD& image);
ImageD read_f32(const std::filesystem::path& file, int rows, int cols, int channels);

double srgb_to_linear(double v);

}  // namespace nlos
