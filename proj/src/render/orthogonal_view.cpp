#include "nlos/render/orthogonal_view.hpp"

#include <cmath>
#include <limits>

namespace nlos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void view_plane(const WallGeometry& wall, const PlanarObject& obj, OrthogonalView& out) {
  const ChartFrame f = obj.frame();
  const double nz = f.normal.z();
  if (std::abs(nz) < 1e-12) return;
  const int rows = obj.material.rows();
  const int cols = obj.material.cols();
  const double d = f.normal.dot(f.center);
  for (int i = 0; i < wall.rows; ++i) {
    for (int j = 0; j < wall.cols; ++j) {
      const Vec3 w = wall.pixel_to_point(i, j);
      const double t = (d - f.normal.dot(w)) / nz;
      if (!(t > 0.0)) continue;
      const Vec2 ab = f.coords(w + t * Vec3::UnitZ());
      const double u = (ab.x() + 0.5 * f.width_m) / f.width_m;
      const double v = (0.5 * f.height_m - ab.y()) / f.height_m;
      if (!(u >= 0.0 && u < 1.0 && v >= 0.0 && v < 1.0)) continue;
      const int tc = std::min(static_cast<int>(u * cols), cols - 1);
      const int tr = std::min(static_cast<int>(v * rows), rows - 1);
      const Rgb a = obj.material.diffuse.at(tr, tc);
      for (int c = 0; c < 3; ++c) out.albedo(i, j, c) = a[c];
      out.depth(i, j) = t;
    }
  }
}

void view_mesh(const WallGeometry& wall, const TriangleMesh& mesh, OrthogonalView& out) {
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const auto& face = mesh.faces[fi];
    const Vec3& p0 = mesh.vertices[face[0]];
    const Vec3& p1 = mesh.vertices[face[1]];
    const Vec3& p2 = mesh.vertices[face[2]];
    const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
    if (std::abs(det) < 1e-18) continue;
    double rmin = kInf, rmax = -kInf, cmin = kInf, cmax = -kInf;
    for (const Vec3* p : {&p0, &p1, &p2}) {
      const Vec2 rc = wall.point_to_pixel_continuous(Vec3(p->x(), p->y(), 0.0));
      rmin = std::min(rmin, rc.x());
      rmax = std::max(rmax, rc.x());
      cmin = std::min(cmin, rc.y());
      cmax = std::max(cmax, rc.y());
    }
    const int i0 = std::max(0, static_cast<int>(std::floor(rmin)));
    const int i1 = std::min(wall.rows - 1, static_cast<int>(std::ceil(rmax)));
    const int j0 = std::max(0, static_cast<int>(std::floor(cmin)));
    const int j1 = std::min(wall.cols - 1, static_cast<int>(std::ceil(cmax)));
    const Rgb albedo = mesh.material_of(fi).diffuse.at(0, 0);
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        const Vec3 w = wall.pixel_to_point(i, j);
        const double dx = w.x() - p0.x();
        const double dy = w.y() - p0.y();
        const double a = (dx * (p2.y() - p0.y()) - (p2.x() - p0.x()) * dy) / det;
        const double b = ((p1.x() - p0.x()) * dy - dx * (p1.y() - p0.y())) / det;
        if (!(a >= 0.0 && b >= 0.0 && a + b <= 1.0)) continue;
        const double z = p0.z() + a * (p1.z() - p0.z()) + b * (p2.z() - p0.z());
        if (z >= out.depth(i, j)) continue;
        out.depth(i, j) = z;
        for (int c = 0; c < 3; ++c) out.albedo(i, j, c) = albedo[c];
      }
    }
  }
}

}  // namespace

OrthogonalView render_orthogonal_view(const Scene& scene) {
  scene.wall.validate();
  const WallGeometry& wall = scene.wall;
  OrthogonalView out{ImageD(wall.rows, wall.cols, 3), ImageD(wall.rows, wall.cols, 1, kInf)};
  if (const auto* p = std::get_if<PlanarObject>(&scene.hidden)) view_plane(wall, *p, out);
  if (const auto* m = std::get_if<TriangleMesh>(&scene.hidden)) view_mesh(wall, *m, out);
  return out;
}

ImageD depth_for_file(const ImageD& depth) {
  ImageD out = depth;
  for (double& v : out.data()) {
    if (!std::isfinite(v)) v = 0.0;
  }
  return out;
}

}  // namespace nlos
