#include "nlos/core/plane.hpp"

#include <algorithm>
#include <cmath>

#include "nlos/core/error.hpp"

namespace nlos {

Vec3 PlaneParams::normal() const {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

Vec3 PlaneParams::dnormal_dtheta() const {
  const double ct = std::cos(theta);
  return {ct * std::cos(phi), ct * std::sin(phi), -std::sin(theta)};
}

Vec3 PlaneParams::dnormal_dphi() const {
  const double st = std::sin(theta);
  return {-st * std::sin(phi), st * std::cos(phi), 0.0};
}

Vec3 PlaneParams::normal_toward_wall() const {
  const Vec3 n = normal();
  return n.z() > 0.0 ? Vec3(-n) : n;
}

PlaneParams PlaneParams::from_normal(const Vec3& n_in, double nu, const Vec3& origin) {
  Vec3 n = n_in.normalized();
  if (n.z() < 0.0) n = -n;
  PlaneParams p;
  p.theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  p.phi = std::atan2(n.y(), n.x());
  p.nu = nu;
  p.origin = origin;
  return p;
}

double normal_angle(const Vec3& a, const Vec3& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(1.0, c));
}

std::pair<Vec3, Vec3> plane_chart_basis(const Vec3& n_in) {
  const Vec3 n = n_in.normalized();
  Vec3 a = Vec3::UnitX() - n.x() * n;
  if (a.norm() < 1e-6) throw DegenerateGeometry("plane normal is parallel to the wall x axis");
  a.normalize();
  Vec3 b = Vec3::UnitY() - n.y() * n - a.y() * a;
  if (b.norm() < 1e-6) throw DegenerateGeometry("plane chart basis is degenerate");
  b.normalize();
  return {a, b};
}

}  // namespace nlos
