#include <arm_neon.h>

#include <cfloat>

#include "nlos/simd/kernels.hpp"
#include "vmath_constants.hpp"

namespace nlos::simd::detail {

namespace {

using namespace vmath;

inline float64x2_t splat(double v) { return vdupq_n_f64(v); }

inline float64x2_t log_pd(float64x2_t x) {
  const uint64x2_t tiny = vcltq_f64(x, splat(DBL_MIN));
  x = vbslq_f64(tiny, vmulq_f64(x, splat(18014398509481984.0)), x);
  const float64x2_t kadj = vbslq_f64(tiny, splat(-54.0), splat(0.0));
  const uint64x2_t bits = vreinterpretq_u64_f64(x);
  float64x2_t e = vcvtq_f64_u64(vandq_u64(vshrq_n_u64(bits, 52), vdupq_n_u64(0x7ff)));
  float64x2_t m = vreinterpretq_f64_u64(
      vorrq_u64(vandq_u64(bits, vdupq_n_u64(0x000FFFFFFFFFFFFFULL)), vdupq_n_u64(0x3FF0000000000000ULL)));
  const uint64x2_t big = vcgtq_f64(m, splat(kSqrt2));
  m = vbslq_f64(big, vmulq_f64(m, splat(0.5)), m);
  e = vbslq_f64(big, vaddq_f64(e, splat(1.0)), e);
  const float64x2_t k = vaddq_f64(vsubq_f64(e, splat(1023.0)), kadj);
  const float64x2_t f = vdivq_f64(vsubq_f64(m, splat(1.0)), vaddq_f64(m, splat(1.0)));
  const float64x2_t s = vmulq_f64(f, f);
  float64x2_t p = splat(kLogSeries[0]);
  for (int i = 1; i < 11; ++i) p = vfmaq_f64(splat(kLogSeries[i]), p, s);
  const float64x2_t log_m = vmulq_f64(vaddq_f64(f, f), p);
  return vfmaq_f64(vfmaq_f64(log_m, k, splat(kLn2Lo)), k, splat(kLn2Hi));
}

inline float64x2_t exp_neg_pd(float64x2_t y) {
  const uint64x2_t under = vcltq_f64(y, splat(kExpMin));
  y = vmaxq_f64(y, splat(kExpMin));
  const float64x2_t kd = vrndnq_f64(vmulq_f64(y, splat(kLog2e)));
  const float64x2_t r = vfmsq_f64(vfmsq_f64(y, kd, splat(kLn2Hi)), kd, splat(kLn2Lo));
  float64x2_t p = splat(kExpSeries[0]);
  for (int i = 1; i < 14; ++i) p = vfmaq_f64(splat(kExpSeries[i]), p, r);
  const int64x2_t ki = vcvtq_s64_f64(kd);
  const float64x2_t scale = vreinterpretq_f64_s64(vshlq_n_s64(vaddq_s64(ki, vdupq_n_s64(1023)), 52));
  const float64x2_t value = vmulq_f64(p, scale);
  return vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(value), under));
}

inline float64x2_t lobe_pd(float64x2_t base, double exponent) {
  if (exponent == 0.0) return splat(1.0);
  const uint64x2_t positive = vcgtq_f64(base, splat(0.0));
  const float64x2_t safe = vbslq_f64(positive, base, splat(1.0));
  const float64x2_t value = exp_neg_pd(vmulq_f64(splat(exponent), log_pd(safe)));
  return vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(value), positive));
}

inline float64x2_t dot3(float64x2_t ax, float64x2_t ay, float64x2_t az, float64x2_t bx, float64x2_t by,
                        float64x2_t bz) {
  return vaddq_f64(vaddq_f64(vmulq_f64(ax, bx), vmulq_f64(ay, by)), vmulq_f64(az, bz));
}

inline float64x2_t masked(uint64x2_t m, float64x2_t v) {
  return vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(v), m));
}

inline uint64x2_t lane_mask(int remaining) {
  const uint64x2_t idx = {0, 1};
  return vcltq_u64(idx, vdupq_n_u64(static_cast<std::uint64_t>(remaining)));
}

inline void accumulate(double* dst, int remaining, float64x2_t add) {
  dst[0] += vgetq_lane_f64(add, 0);
  if (remaining > 1) dst[1] += vgetq_lane_f64(add, 1);
}

}  // namespace

long oracle_rows_neon(const OraclePatch* patches, std::size_t count, const WallSpan& span, double eps2, double* r,
                      double* g, double* b) {
  long skipped = 0;
  for (std::size_t p = 0; p < count; ++p) {
    const OraclePatch& q = patches[p];
    for (int j = 0; j < span.count; j += 2) {
      const int remaining = span.count - j;
      const uint64x2_t lanes = lane_mask(remaining);
      const float64x2_t jj = {static_cast<double>(j), static_cast<double>(j + 1)};
      const float64x2_t dx = vsubq_f64(vaddq_f64(splat(span.start[0]), vmulq_f64(jj, splat(span.step[0]))), splat(q.x[0]));
      const float64x2_t dy = vsubq_f64(vaddq_f64(splat(span.start[1]), vmulq_f64(jj, splat(span.step[1]))), splat(q.x[1]));
      const float64x2_t dz = vsubq_f64(vaddq_f64(splat(span.start[2]), vmulq_f64(jj, splat(span.step[2]))), splat(q.x[2]));
      const float64x2_t r2 = dot3(dx, dy, dz, dx, dy, dz);
      const uint64x2_t near = vandq_u64(vcltq_f64(r2, splat(eps2)), lanes);
      skipped += static_cast<long>((vgetq_lane_u64(near, 0) & 1) + (vgetq_lane_u64(near, 1) & 1));
      const float64x2_t ndot = dot3(splat(q.n[0]), splat(q.n[1]), splat(q.n[2]), dx, dy, dz);
      const uint64x2_t ok = vbicq_u64(vandq_u64(vcgtq_f64(ndot, splat(0.0)), lanes), near);
      if ((vgetq_lane_u64(ok, 0) | vgetq_lane_u64(ok, 1)) == 0) continue;
      const float64x2_t inv_r2 = vdivq_f64(splat(1.0), r2);
      float64x2_t cr = splat(q.kd[0]), cg = splat(q.kd[1]), cb = splat(q.kd[2]);
      if (q.specular) {
        const float64x2_t inv_r = vdivq_f64(splat(1.0), vsqrtq_f64(r2));
        const float64x2_t cos_r = vmulq_f64(dot3(splat(q.mirror[0]), splat(q.mirror[1]), splat(q.mirror[2]), dx, dy, dz), inv_r);
        const float64x2_t lobe = lobe_pd(cos_r, q.exponent);
        cr = vaddq_f64(cr, vmulq_f64(splat(q.ks[0]), lobe));
        cg = vaddq_f64(cg, vmulq_f64(splat(q.ks[1]), lobe));
        cb = vaddq_f64(cb, vmulq_f64(splat(q.ks[2]), lobe));
      }
      accumulate(r + j, remaining, masked(ok, vmulq_f64(cr, inv_r2)));
      accumulate(g + j, remaining, masked(ok, vmulq_f64(cg, inv_r2)));
      accumulate(b + j, remaining, masked(ok, vmulq_f64(cb, inv_r2)));
    }
  }
  return skipped;
}

void fast_row_neon(const FastPrimitive& prim, const FastDirection& dir, const FastLight& light, const WallSpan& span,
                   const int* owner, int id, double* r, double* g, double* b) {
  const float64x2_t sx = splat(dir.s[0]), sy = splat(dir.s[1]), sz = splat(dir.s[2]);
  const float64x2_t zero = splat(0.0), one = splat(1.0);
  for (int j = 0; j < span.count; j += 2) {
    const int remaining = span.count - j;
    uint64x2_t lanes = lane_mask(remaining);
    if (owner) {
      const std::uint64_t o0 = owner[j] == id ? ~0ULL : 0ULL;
      const std::uint64_t o1 = remaining > 1 && owner[j + 1] == id ? ~0ULL : 0ULL;
      const uint64x2_t own = {o0, o1};
      lanes = vandq_u64(lanes, own);
    }
    const float64x2_t jj = {static_cast<double>(j), static_cast<double>(j + 1)};
    const float64x2_t wx = vaddq_f64(splat(span.start[0]), vmulq_f64(jj, splat(span.step[0])));
    const float64x2_t wy = vaddq_f64(splat(span.start[1]), vmulq_f64(jj, splat(span.step[1])));
    const float64x2_t wz = vaddq_f64(splat(span.start[2]), vmulq_f64(jj, splat(span.step[2])));
    const float64x2_t nw = dot3(splat(prim.n[0]), splat(prim.n[1]), splat(prim.n[2]), wx, wy, wz);
    const float64x2_t t = vmulq_f64(vsubq_f64(splat(prim.d), nw), splat(dir.inv_ns));
    uint64x2_t ok = vandq_u64(lanes, vcgtq_f64(t, zero));
    const float64x2_t x0 = vaddq_f64(wx, vmulq_f64(t, sx));
    const float64x2_t x1 = vaddq_f64(wy, vmulq_f64(t, sy));
    const float64x2_t x2 = vaddq_f64(wz, vmulq_f64(t, sz));
    const float64x2_t ox = vsubq_f64(x0, splat(prim.origin[0]));
    const float64x2_t oy = vsubq_f64(x1, splat(prim.origin[1]));
    const float64x2_t oz = vsubq_f64(x2, splat(prim.origin[2]));
    const float64x2_t a = dot3(ox, oy, oz, splat(prim.da[0]), splat(prim.da[1]), splat(prim.da[2]));
    const float64x2_t bb = dot3(ox, oy, oz, splat(prim.db[0]), splat(prim.db[1]), splat(prim.db[2]));
    ok = vandq_u64(ok, vandq_u64(vcgeq_f64(a, zero), vcgeq_f64(bb, zero)));
    int texel[2] = {0, 0};
    if (prim.triangle) {
      ok = vandq_u64(ok, vcleq_f64(vaddq_f64(a, bb), one));
    } else {
      ok = vandq_u64(ok, vandq_u64(vcltq_f64(a, one), vcltq_f64(bb, one)));
      for (int k = 0; k < 2; ++k) {
        if (((k == 0) ? vgetq_lane_u64(ok, 0) : vgetq_lane_u64(ok, 1)) == 0) continue;
        const double ak = k == 0 ? vgetq_lane_f64(a, 0) : vgetq_lane_f64(a, 1);
        const double bk = k == 0 ? vgetq_lane_f64(bb, 0) : vgetq_lane_f64(bb, 1);
        const int tc = std::min(static_cast<int>(ak * prim.tex_cols), prim.tex_cols - 1);
        const int tr = std::min(static_cast<int>(bk * prim.tex_rows), prim.tex_rows - 1);
        texel[k] = tr * prim.tex_cols + tc;
      }
    }
    float64x2_t nx = splat(prim.n[0]), ny = splat(prim.n[1]), nz = splat(prim.n[2]);
    if (prim.smooth) {
      nx = vaddq_f64(vaddq_f64(splat(prim.n0[0]), vmulq_f64(a, splat(prim.dna[0]))), vmulq_f64(bb, splat(prim.dnb[0])));
      ny = vaddq_f64(vaddq_f64(splat(prim.n0[1]), vmulq_f64(a, splat(prim.dna[1]))), vmulq_f64(bb, splat(prim.dnb[1])));
      nz = vaddq_f64(vaddq_f64(splat(prim.n0[2]), vmulq_f64(a, splat(prim.dna[2]))), vmulq_f64(bb, splat(prim.dnb[2])));
      const float64x2_t inv_n = vdivq_f64(one, vsqrtq_f64(dot3(nx, ny, nz, nx, ny, nz)));
      nx = vmulq_f64(nx, inv_n);
      ny = vmulq_f64(ny, inv_n);
      nz = vmulq_f64(nz, inv_n);
    }
    ok = vandq_u64(ok, vcgtq_f64(vsubq_f64(zero, dot3(nx, ny, nz, sx, sy, sz)), zero));
    const float64x2_t lx = vsubq_f64(splat(light.position[0]), x0);
    const float64x2_t ly = vsubq_f64(splat(light.position[1]), x1);
    const float64x2_t lz = vsubq_f64(splat(light.position[2]), x2);
    const float64x2_t rl2 = dot3(lx, ly, lz, lx, ly, lz);
    const float64x2_t inv_rl = vdivq_f64(one, vsqrtq_f64(rl2));
    const float64x2_t cos_i = vmulq_f64(dot3(nx, ny, nz, lx, ly, lz), inv_rl);
    ok = vandq_u64(ok, vcgtq_f64(cos_i, zero));
    if ((vgetq_lane_u64(ok, 0) | vgetq_lane_u64(ok, 1)) == 0) continue;
    const double* kd0 = prim.kd + 4 * texel[0];
    const double* kd1 = prim.kd + 4 * texel[1];
    float64x2_t cr = {kd0[0], kd1[0]}, cg = {kd0[1], kd1[1]}, cb = {kd0[2], kd1[2]};
    if (prim.specular) {
      const float64x2_t two_cos = vaddq_f64(cos_i, cos_i);
      const float64x2_t mx = vsubq_f64(vmulq_f64(two_cos, nx), vmulq_f64(lx, inv_rl));
      const float64x2_t my = vsubq_f64(vmulq_f64(two_cos, ny), vmulq_f64(ly, inv_rl));
      const float64x2_t mz = vsubq_f64(vmulq_f64(two_cos, nz), vmulq_f64(lz, inv_rl));
      const float64x2_t cos_r = vsubq_f64(zero, dot3(mx, my, mz, sx, sy, sz));
      const float64x2_t lobe = lobe_pd(cos_r, prim.exponent);
      const double* ks0 = prim.ks + 4 * texel[0];
      const double* ks1 = prim.ks + 4 * texel[1];
      cr = vaddq_f64(cr, vmulq_f64(float64x2_t{ks0[0], ks1[0]}, lobe));
      cg = vaddq_f64(cg, vmulq_f64(float64x2_t{ks0[1], ks1[1]}, lobe));
      cb = vaddq_f64(cb, vmulq_f64(float64x2_t{ks0[2], ks1[2]}, lobe));
    }
    const float64x2_t scale = vmulq_f64(vdivq_f64(cos_i, rl2), splat(dir.weight));
    accumulate(r + j, remaining, masked(ok, vmulq_f64(vmulq_f64(cr, scale), splat(light.power[0]))));
    accumulate(g + j, remaining, masked(ok, vmulq_f64(vmulq_f64(cg, scale), splat(light.power[1]))));
    accumulate(b + j, remaining, masked(ok, vmulq_f64(vmulq_f64(cb, scale), splat(light.power[2]))));
  }
}

}  // namespace nlos::simd::detail
