#include "nlos/core/scene.hpp"

#include <cmath>
#include <string>

#include "nlos/core/error.hpp"

namespace nlos {

bool AlbedoMap::is_zero() const {
  for (const Rgb& t : texels) {
    if ((t != 0.0).any()) return false;
  }
  return true;
}

static void validate_map(const AlbedoMap& m, const char* what) {
  NLOS_REQUIRE(m.rows >= 1 && m.cols >= 1, std::string(what) + " map must be at least 1x1");
  NLOS_REQUIRE(m.texels.size() == static_cast<std::size_t>(m.rows) * m.cols,
               std::string(what) + " map size does not match its dimensions");
  for (const Rgb& t : m.texels) {
    NLOS_REQUIRE((t >= 0.0).all() && t.allFinite(), std::string(what) + " albedo must be finite and >= 0");
  }
}

void PhongMaterial::validate() const {
  validate_map(diffuse, "diffuse");
  validate_map(specular, "specular");
  NLOS_REQUIRE(std::isfinite(exponent) && exponent >= 0.0, "Phong exponent must be finite and >= 0");
  const bool d_broadcast = diffuse.is_constant() || (diffuse.rows == rows() && diffuse.cols == cols());
  const bool s_broadcast = specular.is_constant() || (specular.rows == rows() && specular.cols == cols());
  NLOS_REQUIRE(d_broadcast && s_broadcast, "diffuse and specular maps must share a resolution or be constant");
}

Vec3 ChartFrame::texel_center(int r, int c, int rows, int cols) const {
  const Vec2 ab = from_texel(r, c, rows, cols);
  return point(ab.x(), ab.y());
}

Vec2 ChartFrame::from_texel(double r, double c, int rows, int cols) const {
  return {-0.5 * width_m + (c + 0.5) * width_m / cols, 0.5 * height_m - (r + 0.5) * height_m / rows};
}

Vec2 ChartFrame::to_texel(const Vec2& ab, int rows, int cols) const {
  return {(0.5 * height_m - ab.y()) * rows / height_m - 0.5, (ab.x() + 0.5 * width_m) * cols / width_m - 0.5};
}

std::array<Vec3, 4> ChartFrame::corners() const {
  const double a = 0.5 * width_m;
  const double b = 0.5 * height_m;
  return {point(-a, b), point(a, b), point(a, -b), point(-a, -b)};
}

ChartFrame PlanarObject::frame() const {
  const Vec3 n = plane.normal();
  const auto [a0, b0] = plane_chart_basis(n);
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  ChartFrame f;
  f.axis_a = c * a0 + s * b0;
  f.axis_b = -s * a0 + c * b0;
  f.center = plane.point() + center_offset.x() * a0 + center_offset.y() * b0;
  f.normal = plane.normal_toward_wall();
  f.width_m = width_m;
  f.height_m = height_m;
  return f;
}

void PlanarObject::validate() const {
  NLOS_REQUIRE(width_m > 0 && height_m > 0, "planar chart extent must be positive");
  material.validate();
  for (const Vec3& corner : frame().corners()) {
    NLOS_REQUIRE(corner.z() > 0.0, "planar object must lie strictly in the hidden half-space z > 0");
  }
}

void TriangleMesh::validate() const {
  NLOS_REQUIRE(normals.size() == vertices.size(), "mesh needs one normal per vertex");
  NLOS_REQUIRE(!materials.empty(), "mesh needs at least one material");
  for (const Vec3& v : vertices) NLOS_REQUIRE(v.z() > 0.0, "mesh vertices must lie in z > 0");
  for (const Vec3& n : normals) NLOS_REQUIRE(is_unit(n, 1e-9), "mesh normals must be unit length");
  const int nv = static_cast<int>(vertices.size());
  for (const auto& f : faces) {
    for (int idx : f) NLOS_REQUIRE(idx >= 0 && idx < nv, "mesh face references a missing vertex");
  }
  NLOS_REQUIRE(face_material.empty() || face_material.size() == faces.size(),
               "face_material must be empty or have one entry per face");
  for (int m : face_material) {
    NLOS_REQUIRE(m >= 0 && static_cast<std::size_t>(m) < materials.size(), "face material index out of range");
  }
  for (const auto& m : materials) m.validate();
}

void Scene::validate() const {
  wall.validate();
  for (const auto& s : sources) s.validate(wall);
  if (const auto* p = std::get_if<PlanarObject>(&hidden)) p->validate();
  if (const auto* m = std::get_if<TriangleMesh>(&hidden)) m->validate();
  if (noise) noise->validate();
}

std::vector<VirtualSource> source_grid(const WallGeometry& wall, int rows, int cols, double fraction,
                                       const Rgb& power) {
  NLOS_REQUIRE(rows >= 1 && cols >= 1, "source grid must be at least 1x1");
  NLOS_REQUIRE(fraction > 0.0 && fraction <= 1.0, "source grid fraction must be in (0, 1]");
  std::vector<VirtualSource> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  const double w = wall.width_m * fraction;
  const double h = wall.height_m * fraction;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x = -0.5 * w + (c + 0.5) * w / cols;
      const double y = 0.5 * h - (r + 0.5) * h / rows;
      out.push_back({wall.origin + x * wall.u + y * wall.v, power});
    }
  }
  return out;
}

}  // namespace nlos
