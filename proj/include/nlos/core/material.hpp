#pragma once

#include <vector>

#include "nlos/core/math.hpp"

namespace nlos {

/// Per-texel RGB albedo over a rectangular chart, row 0 at the top.
/// A 1x1 map is a constant albedo.
struct AlbedoMap {
  int rows = 1;
  int cols = 1;
  std::vector<Rgb> texels{Rgb::Zero()};

  static AlbedoMap constant(const Rgb& value) { return {1, 1, {value}}; }
  static AlbedoMap zeros(int rows, int cols) {
    return {rows, cols, std::vector<Rgb>(static_cast<std::size_t>(rows) * cols, Rgb::Zero())};
  }

  /// Sample with broadcast: a constant map answers every texel query.
  const Rgb& at(int r, int c) const {
    if (rows == 1 && cols == 1) return texels.front();
    return texels[static_cast<std::size_t>(r) * cols + c];
  }
  Rgb& at(int r, int c) { return texels[static_cast<std::size_t>(r) * cols + c]; }
  bool is_constant() const { return rows == 1 && cols == 1; }
  bool is_zero() const;
};

/// Albedos and exponent evaluated at one surface point.
struct PhongSample {
  Rgb alpha_d = Rgb::Zero();
  Rgb alpha_s = Rgb::Zero();
  double exponent = 0.0;
};

struct PhongMaterial {
  AlbedoMap diffuse = AlbedoMap::constant(Rgb::Ones());
  AlbedoMap specular = AlbedoMap::constant(Rgb::Zero());
  double exponent = 0.0;

  void validate() const;
  /// Texture grid shared by both maps (the larger of the two; constants broadcast).
  int rows() const { return std::max(diffuse.rows, specular.rows); }
  int cols() const { return std::max(diffuse.cols, specular.cols); }
  PhongSample sample(int r = 0, int c = 0) const { return {diffuse.at(r, c), specular.at(r, c), exponent}; }
};

}  // namespace nlos
