#pragma once

#include <optional>

#include "nlos/core/plane.hpp"
#include "nlos/core/wall.hpp"

namespace nlos {

/// Wall point hit by the mirror reflection of the ray l -> p off the plane, or
/// nothing when the reflected ray is parallel to or leaves the wall.
/// Throws ContractViolation when p is off the plane by more than 1e-9 m.
std::optional<Vec3> specular_mirror_point(const Vec3& l, const Vec3& p, const PlaneParams& plane,
                                          const WallGeometry& wall);

/// Plane point whose specular reflection carries light from l to the wall point c:
/// mirror l through the plane to l', then intersect the segment l' -> c with the plane.
/// Throws DegenerateGeometry when |(c - l') . n| < 1e-12.
Vec3 reproject_to_plane(const Vec3& c, const Vec3& l, const PlaneParams& plane);

/// Reprojection together with the interpolation parameter s (p = l' + s (c - l'))
/// and dp/d(theta, phi, nu) as columns.
struct Reprojection {
  Vec3 point;
  double s = 0.0;
  Mat3 jacobian;
};

Reprojection reproject_with_jacobian(const Vec3& c, const Vec3& l, const PlaneParams& plane);

}  // namespace nlos
