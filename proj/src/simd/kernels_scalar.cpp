#include <algorithm>
#include <cmath>

#include "nlos/simd/kernels.hpp"

namespace nlos::simd::detail {

namespace {

inline double lobe_power(double cos_r, double exponent) {
  if (exponent == 0.0) return 1.0;
  return cos_r > 0.0 ? std::pow(cos_r, exponent) : 0.0;
}

}  // namespace

long oracle_rows_scalar(const OraclePatch* patches, std::size_t count, const WallSpan& span, double eps2, double* r,
                        double* g, double* b) {
  long skipped = 0;
  for (std::size_t p = 0; p < count; ++p) {
    const OraclePatch& q = patches[p];
    for (int j = 0; j < span.count; ++j) {
      const double dx = span.start[0] + j * span.step[0] - q.x[0];
      const double dy = span.start[1] + j * span.step[1] - q.x[1];
      const double dz = span.start[2] + j * span.step[2] - q.x[2];
      const double r2 = dx * dx + dy * dy + dz * dz;
      if (r2 < eps2) {
        ++skipped;
        continue;
      }
      const double ndot = q.n[0] * dx + q.n[1] * dy + q.n[2] * dz;
      if (ndot <= 0.0) continue;
      const double inv_r2 = 1.0 / r2;
      double cr = q.kd[0];
      double cg = q.kd[1];
      double cb = q.kd[2];
      if (q.specular) {
        const double inv_r = 1.0 / std::sqrt(r2);
        const double cos_r = (q.mirror[0] * dx + q.mirror[1] * dy + q.mirror[2] * dz) * inv_r;
        const double lobe = lobe_power(cos_r, q.exponent);
        cr += q.ks[0] * lobe;
        cg += q.ks[1] * lobe;
        cb += q.ks[2] * lobe;
      }
      r[j] += cr * inv_r2;
      g[j] += cg * inv_r2;
      b[j] += cb * inv_r2;
    }
  }
  return skipped;
}

void fast_row_scalar(const FastPrimitive& prim, const FastDirection& dir, const FastLight& light, const WallSpan& span,
                     const int* owner, int id, double* r, double* g, double* b) {
  const double* s = dir.s;
  for (int j = 0; j < span.count; ++j) {
    if (owner && owner[j] != id) continue;
    const double wx = span.start[0] + j * span.step[0];
    const double wy = span.start[1] + j * span.step[1];
    const double wz = span.start[2] + j * span.step[2];
    const double t = (prim.d - (prim.n[0] * wx + prim.n[1] * wy + prim.n[2] * wz)) * dir.inv_ns;
    if (!(t > 0.0)) continue;
    const double x0 = wx + t * s[0];
    const double x1 = wy + t * s[1];
    const double x2 = wz + t * s[2];
    const double ox = x0 - prim.origin[0];
    const double oy = x1 - prim.origin[1];
    const double oz = x2 - prim.origin[2];
    const double a = ox * prim.da[0] + oy * prim.da[1] + oz * prim.da[2];
    const double bb = ox * prim.db[0] + oy * prim.db[1] + oz * prim.db[2];
    int texel = 0;
    if (prim.triangle) {
      if (!(a >= 0.0 && bb >= 0.0 && a + bb <= 1.0)) continue;
    } else {
      if (!(a >= 0.0 && a < 1.0 && bb >= 0.0 && bb < 1.0)) continue;
      const int tc = std::min(static_cast<int>(a * prim.tex_cols), prim.tex_cols - 1);
      const int tr = std::min(static_cast<int>(bb * prim.tex_rows), prim.tex_rows - 1);
      texel = tr * prim.tex_cols + tc;
    }
    double nx = prim.n[0];
    double ny = prim.n[1];
    double nz = prim.n[2];
    if (prim.smooth) {
      nx = prim.n0[0] + a * prim.dna[0] + bb * prim.dnb[0];
      ny = prim.n0[1] + a * prim.dna[1] + bb * prim.dnb[1];
      nz = prim.n0[2] + a * prim.dna[2] + bb * prim.dnb[2];
      const double inv_n = 1.0 / std::sqrt(nx * nx + ny * ny + nz * nz);
      nx *= inv_n;
      ny *= inv_n;
      nz *= inv_n;
    }
    const double cos_o = -(nx * s[0] + ny * s[1] + nz * s[2]);
    if (!(cos_o > 0.0)) continue;
    const double lx = light.position[0] - x0;
    const double ly = light.position[1] - x1;
    const double lz = light.position[2] - x2;
    const double rl2 = lx * lx + ly * ly + lz * lz;
    const double inv_rl = 1.0 / std::sqrt(rl2);
    const double cos_i = (nx * lx + ny * ly + nz * lz) * inv_rl;
    if (!(cos_i > 0.0)) continue;
    const double* kd = prim.kd + 4 * texel;
    double cr = kd[0];
    double cg = kd[1];
    double cb = kd[2];
    if (prim.specular) {
      // mirror = 2 cos_i n - wi; cos_r = mirror . (-s)
      const double mx = 2.0 * cos_i * nx - lx * inv_rl;
      const double my = 2.0 * cos_i * ny - ly * inv_rl;
      const double mz = 2.0 * cos_i * nz - lz * inv_rl;
      const double cos_r = -(mx * s[0] + my * s[1] + mz * s[2]);
      const double lobe = lobe_power(cos_r, prim.exponent);
      const double* ks = prim.ks + 4 * texel;
      cr += ks[0] * lobe;
      cg += ks[1] * lobe;
      cb += ks[2] * lobe;
    }
    const double scale = cos_i / rl2 * dir.weight;
    r[j] += cr * scale * light.power[0];
    g[j] += cg * scale * light.power[1];
    b[j] += cb * scale * light.power[2];
  }
}

}  // namespace nlos::simd::detail
