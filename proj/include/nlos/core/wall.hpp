#pragma once

#include <utility>

#include "nlos/core/math.hpp"

namespace nlos {

/// The visible diffuse wall. It is the z=0 plane of the world frame with the
/// normal +z pointing into the hidden volume. Row 0 is at the top (+v side),
/// column 0 at the left (-u side).
struct WallGeometry {
  Vec3 origin = Vec3::Zero();  ///< wall center, meters
  Vec3 u = Vec3::UnitX();      ///< in-plane axis along increasing column
  Vec3 v = Vec3::UnitY();      ///< in-plane axis along decreasing row
  double width_m = 2.0;
  double height_m = 2.0;
  int rows = 256;
  int cols = 256;

  /// Throws ContractViolation when any invariant fails.
  void validate() const;

  Vec3 normal() const { return Vec3::UnitZ(); }
  double pixel_width() const { return width_m / cols; }
  double pixel_height() const { return height_m / rows; }

  /// Center of pixel (i, j). Throws BoundsError outside the grid.
  Vec3 pixel_to_point(int i, int j) const;
  /// Continuous pixel coordinates (i, j as reals, integer values at pixel centers).
  Vec3 pixel_to_point(double i, double j) const;
  /// Index of the pixel whose footprint contains p. Throws BoundsError when p is off the wall.
  std::pair<int, int> point_to_pixel(const Vec3& p) const;
  /// Continuous (row, col) of p, not bounds checked.
  Vec2 point_to_pixel_continuous(const Vec3& p) const;
  bool contains(const Vec3& p) const;
};

Vec3 wall_pixel_to_point(const WallGeometry& wall, int i, int j);

/// A beam spot on the wall acting as a point light for the hidden scene.
struct VirtualSource {
  Vec3 position = Vec3::Zero();
  Rgb power = Rgb::Ones();

  void validate(const WallGeometry& wall) const;
};

}  // namespace nlos
