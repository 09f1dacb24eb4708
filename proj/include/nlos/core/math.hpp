#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <numbers>

namespace nlos {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Rgb = Eigen::Array3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvPi = std::numbers::inv_pi;

inline bool is_unit(const Vec3& v, double tol) { return std::abs(v.norm() - 1.0) <= tol; }

}  // namespace nlos
