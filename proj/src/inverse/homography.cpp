#include "nlos/inverse/homography.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>

#include "nlos/core/error.hpp"
#include "nlos/inverse/mirror.hpp"

namespace nlos {

ChartFrame PlaneChart::frame() const {
  const auto [ea, eb] = plane_chart_basis(plane.normal());
  ChartFrame f;
  f.axis_a = ea;
  f.axis_b = eb;
  f.center = plane.point() + offset.x() * ea + offset.y() * eb;
  f.normal = plane.normal_toward_wall();
  f.width_m = width_m;
  f.height_m = height_m;
  return f;
}

Vec2 PlaneChart::texel_coords(int r, int c) const {
  return frame().from_texel(r, c, rows, cols) + offset;
}

Vec2 PlaneChart::to_texel(const Vec2& ab) const { return frame().to_texel(ab - offset, rows, cols); }

Vec2 wall_coords(const WallGeometry& wall, const Vec3& w) {
  const Vec3 d = w - wall.origin;
  return {d.dot(wall.u), d.dot(wall.v)};
}

Vec2 apply_homography(const Mat3& h, const Vec2& x) {
  const Vec3 y = h * Vec3(x.x(), x.y(), 1.0);
  return y.head<2>() / y.z();
}

Mat3 homography_from_plane(const PlaneParams& plane, const VirtualSource& source, const WallGeometry& wall) {
  const auto [ea, eb] = plane_chart_basis(plane.normal());
  const Vec3 v = plane.point();
  const double hw = 0.5 * wall.width_m;
  const double hh = 0.5 * wall.height_m;
  const std::array<Vec2, 4> image{Vec2(-hw, hh), Vec2(hw, hh), Vec2(hw, -hh), Vec2(-hw, -hh)};

  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> rhs;
  for (int k = 0; k < 4; ++k) {
    const Vec3 corner = wall.origin + image[k].x() * wall.u + image[k].y() * wall.v;
    const Vec3 p = reproject_to_plane(corner, source.position, plane);
    const double x = (p - v).dot(ea);
    const double y = (p - v).dot(eb);
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw DegenerateGeometry("wall corner " + std::to_string(k) + " does not reproject to a finite plane point");
    }
    const double u = image[k].x();
    const double w = image[k].y();
    a.row(2 * k) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * k + 1) << 0, 0, 0, x, y, 1, -w * x, -w * y;
    rhs(2 * k) = u;
    rhs(2 * k + 1) = w;
  }
  const Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
  if (!lu.isInvertible()) throw DegenerateGeometry("homography corner correspondences are collinear");
  const Eigen::Matrix<double, 8, 1> h = lu.solve(rhs);
  Mat3 out;
  out << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  if (!out.allFinite() || std::abs(out.determinant()) <= 1e-12) {
    throw DegenerateGeometry("homography is singular");
  }
  return out;
}

}  // namespace nlos
