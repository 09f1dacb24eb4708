#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "nlos/core/material.hpp"
#include "nlos/core/noise.hpp"
#include "nlos/core/plane.hpp"
#include "nlos/core/wall.hpp"

namespace nlos {

/// Oriented rectangle on a plane. Chart coordinates (a, b) are meters along
/// axis_a / axis_b from the center; texel (0, 0) sits at (-w/2, +h/2).
struct ChartFrame {
  Vec3 center = Vec3::Zero();
  Vec3 axis_a = Vec3::UnitX();
  Vec3 axis_b = Vec3::UnitY();
  Vec3 normal = -Vec3::UnitZ();  ///< toward the wall
  double width_m = 1.0;
  double height_m = 1.0;

  Vec3 point(double a, double b) const { return center + a * axis_a + b * axis_b; }
  Vec2 coords(const Vec3& p) const { return {(p - center).dot(axis_a), (p - center).dot(axis_b)}; }
  /// Center of texel (r, c) on a rows x cols grid.
  Vec3 texel_center(int r, int c, int rows, int cols) const;
  /// Continuous texel coordinates (row, col) of chart coordinates (a, b).
  Vec2 to_texel(const Vec2& ab, int rows, int cols) const;
  Vec2 from_texel(double r, double c, int rows, int cols) const;
  std::array<Vec3, 4> corners() const;
};

/// Textured planar object: a rectangle lying on `plane`, centered at
/// plane.point() + offset in the plane's canonical chart basis, rotated in-plane.
struct PlanarObject {
  PlaneParams plane;
  Vec2 center_offset = Vec2::Zero();
  double rotation = 0.0;  ///< radians, counter-clockwise about the wall-facing normal
  double width_m = 0.5;
  double height_m = 0.5;
  PhongMaterial material;

  ChartFrame frame() const;
  void validate() const;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;  ///< per vertex, unit length
  std::vector<std::array<int, 3>> faces;
  std::vector<int> face_material;  ///< empty: material 0 everywhere
  std::vector<PhongMaterial> materials{PhongMaterial{}};

  void validate() const;
  const PhongMaterial& material_of(std::size_t face) const {
    return materials[face_material.empty() ? 0 : static_cast<std::size_t>(face_material[face])];
  }
};

using HiddenScene = std::variant<std::monostate, PlanarObject, TriangleMesh>;

struct Scene {
  WallGeometry wall;
  std::vector<VirtualSource> sources;
  HiddenScene hidden;
  std::optional<NoiseParams> noise;

  void validate() const;
  bool empty() const { return std::holds_alternative<std::monostate>(hidden); }
};

/// Sources on a rows x cols grid covering the central `fraction` of the wall
/// (cell centers), row-major from the top-left.
std::vector<VirtualSource> source_grid(const WallGeometry& wall, int rows, int cols,
                                       double fraction = 0.8, const Rgb& power = Rgb::Ones());

}  // namespace nlos
