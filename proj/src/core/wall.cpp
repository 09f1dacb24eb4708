#include "nlos/core/wall.hpp"

#include <cmath>
#include <string>

#include "nlos/core/error.hpp"

namespace nlos {

void WallGeometry::validate() const {
  constexpr double tol = 1e-12;
  NLOS_REQUIRE(is_unit(u, tol) && is_unit(v, tol), "wall axes must be unit length");
  NLOS_REQUIRE(std::abs(u.dot(v)) <= tol, "wall axes must be orthogonal");
  NLOS_REQUIRE(std::abs(u.z()) <= tol && std::abs(v.z()) <= tol, "wall axes must lie in the z=0 plane");
  NLOS_REQUIRE(std::abs(origin.z()) <= tol, "wall origin must lie in the z=0 plane");
  NLOS_REQUIRE(width_m > 0 && height_m > 0, "wall extent must be positive");
  NLOS_REQUIRE(rows >= 1 && cols >= 1, "wall resolution must be at least 1x1");
}

Vec3 WallGeometry::pixel_to_point(int i, int j) const {
  if (i < 0 || i >= rows || j < 0 || j >= cols) {
    throw BoundsError("wall pixel (" + std::to_string(i) + ", " + std::to_string(j) + ") outside " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
  return pixel_to_point(static_cast<double>(i), static_cast<double>(j));
}

Vec3 WallGeometry::pixel_to_point(double i, double j) const {
  const double x = -0.5 * width_m + (j + 0.5) * pixel_width();
  const double y = 0.5 * height_m - (i + 0.5) * pixel_height();
  return origin + x * u + y * v;
}

Vec2 WallGeometry::point_to_pixel_continuous(const Vec3& p) const {
  const Vec3 d = p - origin;
  const double x = d.dot(u);
  const double y = d.dot(v);
  return {(0.5 * height_m - y) / pixel_height() - 0.5, (x + 0.5 * width_m) / pixel_width() - 0.5};
}

std::pair<int, int> WallGeometry::point_to_pixel(const Vec3& p) const {
  const Vec2 rc = point_to_pixel_continuous(p);
  const int i = static_cast<int>(std::floor(rc.x() + 0.5));
  const int j = static_cast<int>(std::floor(rc.y() + 0.5));
  if (i < 0 || i >= rows || j < 0 || j >= cols) throw BoundsError("point is outside the wall extent");
  return {i, j};
}

bool WallGeometry::contains(const Vec3& p) const {
  const Vec3 d = p - origin;
  return std::abs(d.dot(u)) <= 0.5 * width_m && std::abs(d.dot(v)) <= 0.5 * height_m;
}

Vec3 wall_pixel_to_point(const WallGeometry& wall, int i, int j) { return wall.pixel_to_point(i, j); }

void VirtualSource::validate(const WallGeometry& wall) const {
  NLOS_REQUIRE(std::abs((position - wall.origin).dot(wall.normal())) <= 1e-9,
               "virtual source must lie on the wall plane");
  NLOS_REQUIRE((power >= 0.0).all() && power.allFinite(), "source power must be finite and >= 0");
}

}  // namespace nlos
