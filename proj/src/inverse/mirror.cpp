#include "nlos/inverse/mirror.hpp"

#include <cmath>

#include "nlos/core/error.hpp"

namespace nlos {

std::optional<Vec3> specular_mirror_point(const Vec3& l, const Vec3& p, const PlaneParams& plane,
                                          const WallGeometry& wall) {
  const Vec3 n = plane.normal();
  NLOS_REQUIRE(std::abs((p - plane.point()).dot(n)) <= 1e-9, "specular_mirror_point: p is not on the plane");
  const Vec3 d = p - l;
  const Vec3 r = d - 2.0 * d.dot(n) * n;
  const Vec3 N = wall.normal();
  const double toward = N.dot(r);
  if (!(toward < -1e-15)) return std::nullopt;
  const double t = -N.dot(p - wall.origin) / toward;
  if (!(t > 0.0)) return std::nullopt;
  Vec3 c = p + t * r;
  c -= N.dot(c - wall.origin) * N;  // remove rounding off the wall plane
  return c;
}

Vec3 reproject_to_plane(const Vec3& c, const Vec3& l, const PlaneParams& plane) {
  const Vec3 n = plane.normal();
  const Vec3 v = plane.point();
  const double h = (l - v).dot(n);
  const double k = (c - v).dot(n);
  if (std::abs(h + k) < 1e-12) throw DegenerateGeometry("reproject_to_plane: line from the mirrored source is parallel to the plane");
  const Vec3 lm = l - 2.0 * h * n;
  return lm + (h / (h + k)) * (c - lm);
}

Reprojection reproject_with_jacobian(const Vec3& c, const Vec3& l, const PlaneParams& plane) {
  const Vec3 n = plane.normal();
  const Vec3 v = plane.point();
  const double h = (l - v).dot(n);
  const double k = (c - v).dot(n);
  const double hk = h + k;
  if (std::abs(hk) < 1e-12) throw DegenerateGeometry("reproject_to_plane: line from the mirrored source is parallel to the plane");
  const Vec3 lm = l - 2.0 * h * n;
  const double s = h / hk;
  Reprojection out;
  out.point = lm + s * (c - lm);
  out.s = s;
  const Vec3 dn[3] = {plane.dnormal_dtheta(), plane.dnormal_dphi(), Vec3::Zero()};
  const Vec3 dv[3] = {Vec3::Zero(), Vec3::Zero(), Vec3::UnitZ()};
  for (int q = 0; q < 3; ++q) {
    const double dh = (l - v).dot(dn[q]) - dv[q].dot(n);
    const double dk = (c - v).dot(dn[q]) - dv[q].dot(n);
    const Vec3 dlm = -2.0 * (dh * n + h * dn[q]);
    const double ds = (dh * k - h * dk) / (hk * hk);
    out.jacobian.col(q) = (1.0 - s) * dlm + ds * (c - lm);
  }
  return out;
}

}  // namespace nlos
