#include "primitives.hpp"

#include <cmath>

#include "nlos/core/error.hpp"

namespace nlos::detail {

namespace {

Rgb specular_norm(const Rgb& alpha_s, double exponent) { return alpha_s * (exponent + 2.0) / (2.0 * kPi); }

void tessellate_plane(const PlanarObject& obj, double density, std::vector<SurfacePatch>& out) {
  const ChartFrame f = obj.frame();
  const PhongMaterial& m = obj.material;
  const int rows = m.rows();
  const int cols = m.cols();
  const double tw = f.width_m / cols;
  const double th = f.height_m / rows;
  const int ka = std::max(1, static_cast<int>(std::ceil(tw * density - 1e-9)));
  const int kb = std::max(1, static_cast<int>(std::ceil(th * density - 1e-9)));
  const double area = tw * th / (ka * kb);
  out.reserve(out.size() + static_cast<std::size_t>(rows) * cols * ka * kb);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const PhongSample s = m.sample(r, c);
      if ((s.alpha_d == 0.0).all() && (s.alpha_s == 0.0).all()) continue;
      for (int i = 0; i < kb; ++i) {
        for (int j = 0; j < ka; ++j) {
          const double a = -0.5 * f.width_m + (c + (j + 0.5) / ka) * tw;
          const double b = 0.5 * f.height_m - (r + (i + 0.5) / kb) * th;
          out.push_back({f.point(a, b), f.normal, area, s.alpha_d, s.alpha_s, s.exponent});
        }
      }
    }
  }
}

void tessellate_mesh(const TriangleMesh& mesh, double density, std::vector<SurfacePatch>& out) {
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const auto& face = mesh.faces[fi];
    const PhongMaterial& mat = mesh.material_of(fi);
    NLOS_REQUIRE(mat.diffuse.is_constant() && mat.specular.is_constant(),
                 "mesh materials must have constant albedos");
    const PhongSample s = mat.sample();
    const Vec3& p0 = mesh.vertices[face[0]];
    const Vec3 e1 = mesh.vertices[face[1]] - p0;
    const Vec3 e2 = mesh.vertices[face[2]] - p0;
    const double area = 0.5 * e1.cross(e2).norm();
    if (area <= 0.0) continue;
    const Vec3& n0 = mesh.normals[face[0]];
    const Vec3 dn1 = mesh.normals[face[1]] - n0;
    const Vec3 dn2 = mesh.normals[face[2]] - n0;
    const int m = std::max(1, static_cast<int>(std::ceil(std::sqrt(area) * density - 1e-9)));
    const double sub_area = area / (static_cast<double>(m) * m);
    auto emit = [&](double u, double v) {
      out.push_back({p0 + u * e1 + v * e2, (n0 + u * dn1 + v * dn2).normalized(), sub_area, s.alpha_d, s.alpha_s,
                     s.exponent});
    };
    for (int i = 0; i < m; ++i) {
      for (int j = 0; i + j < m; ++j) {
        emit((i + 1.0 / 3.0) / m, (j + 1.0 / 3.0) / m);
        if (i + j < m - 1) emit((i + 2.0 / 3.0) / m, (j + 2.0 / 3.0) / m);
      }
    }
  }
}

void copy3(double* dst, const Vec3& v) {
  dst[0] = v.x();
  dst[1] = v.y();
  dst[2] = v.z();
}

void copy3(double* dst, const Rgb& v) {
  dst[0] = v[0];
  dst[1] = v[1];
  dst[2] = v[2];
}

}  // namespace

std::vector<SurfacePatch> tessellate(const HiddenScene& hidden, double density) {
  NLOS_REQUIRE(density > 0.0, "tessellation density must be positive");
  std::vector<SurfacePatch> out;
  if (const auto* p = std::get_if<PlanarObject>(&hidden)) tessellate_plane(*p, density, out);
  if (const auto* m = std::get_if<TriangleMesh>(&hidden)) tessellate_mesh(*m, density, out);
  return out;
}

std::vector<simd::OraclePatch> light_patches(const std::vector<SurfacePatch>& patches, const VirtualSource& source) {
  std::vector<simd::OraclePatch> out;
  out.reserve(patches.size());
  for (const SurfacePatch& p : patches) {
    const Vec3 to_light = source.position - p.x;
    const double rl2 = to_light.squaredNorm();
    if (!(rl2 > 0.0)) continue;
    const Vec3 wi = to_light / std::sqrt(rl2);
    const double cos_i = p.n.dot(wi);
    if (cos_i <= 0.0) continue;
    const Rgb scale = source.power * (cos_i / rl2 * p.area);
    simd::OraclePatch q{};
    copy3(q.x, p.x);
    copy3(q.n, p.n);
    copy3(q.mirror, Vec3(2.0 * cos_i * p.n - wi));
    copy3(q.kd, Rgb(p.alpha_d * kInvPi * scale));
    copy3(q.ks, Rgb(specular_norm(p.alpha_s, p.exponent) * scale));
    q.exponent = p.exponent;
    q.specular = (p.alpha_s > 0.0).any() ? 1 : 0;
    out.push_back(q);
  }
  return out;
}

void build_fast_scene(const HiddenScene& hidden, FastScene& out) {
  out.prims.clear();
  out.outlines.clear();
  out.tables.clear();
  out.depth_buffered = false;
  if (const auto* obj = std::get_if<PlanarObject>(&hidden)) {
    const ChartFrame f = obj->frame();
    const PhongMaterial& m = obj->material;
    const int rows = m.rows();
    const int cols = m.cols();
    std::vector<double> kd(static_cast<std::size_t>(rows) * cols * 4, 0.0);
    std::vector<double> ks(kd.size(), 0.0);
    bool specular = false;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const PhongSample s = m.sample(r, c);
        const std::size_t k = (static_cast<std::size_t>(r) * cols + c) * 4;
        copy3(&kd[k], Rgb(s.alpha_d * kInvPi));
        copy3(&ks[k], specular_norm(s.alpha_s, s.exponent));
        specular = specular || (s.alpha_s > 0.0).any();
      }
    }
    out.tables.push_back(std::move(kd));
    out.tables.push_back(std::move(ks));
    simd::FastPrimitive p{};
    const Vec3 origin = f.point(-0.5 * f.width_m, 0.5 * f.height_m);
    copy3(p.n, f.normal);
    p.d = f.normal.dot(origin);
    copy3(p.origin, origin);
    copy3(p.da, Vec3(f.axis_a / f.width_m));
    copy3(p.db, Vec3(-f.axis_b / f.height_m));
    p.triangle = 0;
    p.tex_rows = rows;
    p.tex_cols = cols;
    p.kd = out.tables[0].data();
    p.ks = out.tables[1].data();
    p.exponent = m.exponent;
    p.specular = specular ? 1 : 0;
    p.smooth = 0;
    out.prims.push_back(p);
    const auto corners = f.corners();
    out.outlines.emplace_back(corners.begin(), corners.end());
  }
  if (const auto* mesh = std::get_if<TriangleMesh>(&hidden)) {
    out.depth_buffered = mesh->faces.size() > 1;
    out.tables.reserve(2 * mesh->faces.size());
    for (std::size_t fi = 0; fi < mesh->faces.size(); ++fi) {
      const auto& face = mesh->faces[fi];
      const PhongMaterial& mat = mesh->material_of(fi);
      NLOS_REQUIRE(mat.diffuse.is_constant() && mat.specular.is_constant(),
                   "mesh materials must have constant albedos");
      const PhongSample s = mat.sample();
      const Vec3& v0 = mesh->vertices[face[0]];
      const Vec3 e1 = mesh->vertices[face[1]] - v0;
      const Vec3 e2 = mesh->vertices[face[2]] - v0;
      Vec3 n = e1.cross(e2);
      if (!(n.norm() > 0.0)) continue;
      n.normalize();
      const Vec3& n0 = mesh->normals[face[0]];
      const Vec3& n1 = mesh->normals[face[1]];
      const Vec3& n2 = mesh->normals[face[2]];
      if (n.dot(n0 + n1 + n2) < 0.0) n = -n;
      std::vector<double> kd(4, 0.0), ks(4, 0.0);
      copy3(kd.data(), Rgb(s.alpha_d * kInvPi));
      copy3(ks.data(), specular_norm(s.alpha_s, s.exponent));
      out.tables.push_back(std::move(kd));
      out.tables.push_back(std::move(ks));
      simd::FastPrimitive p{};
      copy3(p.n, n);
      p.d = n.dot(v0);
      copy3(p.origin, v0);
      const Vec3 ga = e2.cross(n);
      const Vec3 gb = n.cross(e1);
      copy3(p.da, Vec3(ga / e1.dot(ga)));
      copy3(p.db, Vec3(gb / e2.dot(gb)));
      p.triangle = 1;
      p.tex_rows = 1;
      p.tex_cols = 1;
      p.kd = out.tables[out.tables.size() - 2].data();
      p.ks = out.tables.back().data();
      p.exponent = s.exponent;
      p.specular = (s.alpha_s > 0.0).any() ? 1 : 0;
      p.smooth = (n0 != n1 || n0 != n2) ? 1 : 0;
      copy3(p.n0, n0);
      copy3(p.dna, Vec3(n1 - n0));
      copy3(p.dnb, Vec3(n2 - n0));
      out.prims.push_back(p);
      out.outlines.push_back({v0, mesh->vertices[face[1]], mesh->vertices[face[2]]});
    }
  }
}

}  // namespace nlos::detail
