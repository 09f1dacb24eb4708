#pragma once

#include "nlos/core/math.hpp"

namespace nlos {

/// Plane geometry: unit normal from spherical angles and a point offset along z
/// from the fixed volume origin.
///   n(theta, phi) = (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta))
///   v(nu)         = origin + nu * (0, 0, 1)
struct PlaneParams {
  double theta = 0.0;
  double phi = 0.0;
  double nu = 0.0;
  Vec3 origin{0.0, 0.0, 0.4};

  Vec3 normal() const;
  Vec3 dnormal_dtheta() const;
  Vec3 dnormal_dphi() const;
  Vec3 point() const { return origin + nu * Vec3::UnitZ(); }

  /// Normal flipped so that it points toward the wall (negative z component).
  Vec3 normal_toward_wall() const;

  /// Parameters whose plane has the given normal (either orientation) and passes through
  /// the point origin + nu*z.
  static PlaneParams from_normal(const Vec3& n, double nu, const Vec3& origin);
};

/// Angle in radians between two plane normals, ignoring orientation.
double normal_angle(const Vec3& a, const Vec3& b);

/// Orthonormal in-plane chart axes for a plane with normal n: axis_a from the
/// projected world x axis, axis_b from the projected world y axis (Gram-Schmidt).
/// The result does not depend on the sign of n.
std::pair<Vec3, Vec3> plane_chart_basis(const Vec3& n);

}  // namespace nlos
