#pragma once

#include "nlos/core/plane.hpp"
#include "nlos/core/scene.hpp"
#include "nlos/core/wall.hpp"

namespace nlos {

/// Regular texel grid over a rectangle on a plane, in the plane's canonical chart
/// basis. Chart coordinates (a, b) below are meters from plane.point() along that basis.
struct PlaneChart {
  PlaneParams plane;
  Vec2 offset = Vec2::Zero();  ///< chart center in chart coordinates
  double width_m = 0.5;
  double height_m = 0.5;
  int rows = 64;
  int cols = 64;

  ChartFrame frame() const;
  int texels() const { return rows * cols; }
  /// Chart coordinates of the center of texel (r, c); row 0 at +b.
  Vec2 texel_coords(int r, int c) const;
  /// Continuous (row, col) of chart coordinates.
  Vec2 to_texel(const Vec2& ab) const;
};

/// Wall coordinates (x, y) in meters along wall.u / wall.v from wall.origin.
Vec2 wall_coords(const WallGeometry& wall, const Vec3& w);

Vec2 apply_homography(const Mat3& h, const Vec2& x);

/// Projective map from chart coordinates to wall coordinates for one source: the four
/// wall corners are reprojected onto the plane and the map is fitted to those
/// correspondences by a direct linear transform.
/// Throws DegenerateGeometry when a corner cannot be reprojected or the fit is singular.
Mat3 homography_from_plane(const PlaneParams& plane, const VirtualSource& source, const WallGeometry& wall);

}  // namespace nlos
