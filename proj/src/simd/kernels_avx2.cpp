#include <immintrin.h>

#include <cfloat>

#include "nlos/simd/kernels.hpp"
#include "vmath_constants.hpp"

namespace nlos::simd::detail {

namespace {

using namespace vmath;

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

/// Natural log for x > 0 (denormals included).
inline __m256d log_pd(__m256d x) {
  const __m256d tiny = _mm256_cmp_pd(x, splat(DBL_MIN), _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, splat(18014398509481984.0)), tiny);  // 2^54
  const __m256d kadj = _mm256_blendv_pd(_mm256_setzero_pd(), splat(-54.0), tiny);

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_bits = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
  // int64 -> double for small non-negative integers via the 2^52 trick
  const __m256d two52 = splat(4503599627370496.0);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, _mm256_castpd_si256(two52))), two52);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                                                  _mm256_set1_epi64x(0x3FF0000000000000LL)));
  const __m256d big = _mm256_cmp_pd(m, splat(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, splat(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, splat(1.0)));
  const __m256d k = _mm256_add_pd(_mm256_sub_pd(e, splat(1023.0)), kadj);

  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, splat(1.0)), _mm256_add_pd(m, splat(1.0)));
  const __m256d s = _mm256_mul_pd(f, f);
  __m256d p = splat(kLogSeries[0]);
  for (int i = 1; i < 11; ++i) p = _mm256_fmadd_pd(p, s, splat(kLogSeries[i]));
  const __m256d log_m = _mm256_mul_pd(_mm256_add_pd(f, f), p);
  return _mm256_fmadd_pd(k, splat(kLn2Hi), _mm256_fmadd_pd(k, splat(kLn2Lo), log_m));
}

/// exp(y) for y <= 0; returns 0 below kExpMin.
inline __m256d exp_neg_pd(__m256d y) {
  const __m256d under = _mm256_cmp_pd(y, splat(kExpMin), _CMP_LT_OQ);
  y = _mm256_max_pd(y, splat(kExpMin));
  const __m256d kd = _mm256_round_pd(_mm256_mul_pd(y, splat(kLog2e)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_fnmadd_pd(kd, splat(kLn2Lo), _mm256_fnmadd_pd(kd, splat(kLn2Hi), y));
  __m256d p = splat(kExpSeries[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, splat(kExpSeries[i]));
  const __m256d magic = splat(6755399441055744.0);  // 2^52 + 2^51
  const __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(kd, magic)), _mm256_castpd_si256(magic));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52));
  return _mm256_andnot_pd(under, _mm256_mul_pd(p, scale));
}

/// max(0, base)^exponent with 0^0 = 1.
inline __m256d lobe_pd(__m256d base, double exponent) {
  if (exponent == 0.0) return splat(1.0);
  const __m256d positive = _mm256_cmp_pd(base, _mm256_setzero_pd(), _CMP_GT_OQ);
  const __m256d safe = _mm256_blendv_pd(splat(1.0), base, positive);
  const __m256d value = exp_neg_pd(_mm256_mul_pd(splat(exponent), log_pd(safe)));
  return _mm256_and_pd(positive, value);
}

inline __m256i tail_mask(int remaining) {
  const __m256i lanes = _mm256_setr_epi64x(0, 1, 2, 3);
  return _mm256_cmpgt_epi64(_mm256_set1_epi64x(remaining), lanes);
}

inline __m256d lane_index(int j) { return _mm256_setr_pd(j, j + 1, j + 2, j + 3); }

}  // namespace

long oracle_rows_avx2(const OraclePatch* patches, std::size_t count, const WallSpan& span, double eps2, double* r,
                      double* g, double* b) {
  long skipped = 0;
  for (std::size_t p = 0; p < count; ++p) {
    const OraclePatch& q = patches[p];
    const __m256d qx = splat(q.x[0]), qy = splat(q.x[1]), qz = splat(q.x[2]);
    const __m256d nx = splat(q.n[0]), ny = splat(q.n[1]), nz = splat(q.n[2]);
    const __m256d mx = splat(q.mirror[0]), my = splat(q.mirror[1]), mz = splat(q.mirror[2]);
    const __m256d kdr = splat(q.kd[0]), kdg = splat(q.kd[1]), kdb = splat(q.kd[2]);
    const __m256d ksr = splat(q.ks[0]), ksg = splat(q.ks[1]), ksb = splat(q.ks[2]);
    for (int j = 0; j < span.count; j += 4) {
      const int remaining = span.count - j;
      const __m256i lanes = tail_mask(remaining);
      const __m256d jj = lane_index(j);
      const __m256d dx = _mm256_sub_pd(_mm256_add_pd(splat(span.start[0]), _mm256_mul_pd(jj, splat(span.step[0]))), qx);
      const __m256d dy = _mm256_sub_pd(_mm256_add_pd(splat(span.start[1]), _mm256_mul_pd(jj, splat(span.step[1]))), qy);
      const __m256d dz = _mm256_sub_pd(_mm256_add_pd(splat(span.start[2]), _mm256_mul_pd(jj, splat(span.step[2]))), qz);
      const __m256d r2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
      const __m256d near = _mm256_and_pd(_mm256_cmp_pd(r2, splat(eps2), _CMP_LT_OQ), _mm256_castsi256_pd(lanes));
      skipped += __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(near)));
      const __m256d ndot = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(nx, dx), _mm256_mul_pd(ny, dy)), _mm256_mul_pd(nz, dz));
      const __m256d ok = _mm256_andnot_pd(near, _mm256_and_pd(_mm256_cmp_pd(ndot, _mm256_setzero_pd(), _CMP_GT_OQ),
                                                              _mm256_castsi256_pd(lanes)));
      if (_mm256_movemask_pd(ok) == 0) continue;
      const __m256d inv_r2 = _mm256_div_pd(splat(1.0), r2);
      __m256d cr = kdr, cg = kdg, cb = kdb;
      if (q.specular) {
        const __m256d inv_r = _mm256_div_pd(splat(1.0), _mm256_sqrt_pd(r2));
        const __m256d cos_r = _mm256_mul_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(mx, dx), _mm256_mul_pd(my, dy)), _mm256_mul_pd(mz, dz)), inv_r);
        const __m256d lobe = lobe_pd(cos_r, q.exponent);
        cr = _mm256_add_pd(cr, _mm256_mul_pd(ksr, lobe));
        cg = _mm256_add_pd(cg, _mm256_mul_pd(ksg, lobe));
        cb = _mm256_add_pd(cb, _mm256_mul_pd(ksb, lobe));
      }
      const __m256d add_r = _mm256_and_pd(ok, _mm256_mul_pd(cr, inv_r2));
      const __m256d add_g = _mm256_and_pd(ok, _mm256_mul_pd(cg, inv_r2));
      const __m256d add_b = _mm256_and_pd(ok, _mm256_mul_pd(cb, inv_r2));
      _mm256_maskstore_pd(r + j, lanes, _mm256_add_pd(_mm256_maskload_pd(r + j, lanes), add_r));
      _mm256_maskstore_pd(g + j, lanes, _mm256_add_pd(_mm256_maskload_pd(g + j, lanes), add_g));
      _mm256_maskstore_pd(b + j, lanes, _mm256_add_pd(_mm256_maskload_pd(b + j, lanes), add_b));
    }
  }
  return skipped;
}

void fast_row_avx2(const FastPrimitive& prim, const FastDirection& dir, const FastLight& light, const WallSpan& span,
                   const int* owner, int id, double* r, double* g, double* b) {
  const __m256d sx = splat(dir.s[0]), sy = splat(dir.s[1]), sz = splat(dir.s[2]);
  const __m256d pnx = splat(prim.n[0]), pny = splat(prim.n[1]), pnz = splat(prim.n[2]);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = splat(1.0);
  const __m256d cols = splat(prim.tex_cols), rows = splat(prim.tex_rows);
  const __m256d col_max = splat(prim.tex_cols - 1), row_max = splat(prim.tex_rows - 1);
  for (int j = 0; j < span.count; j += 4) {
    const int remaining = span.count - j;
    __m256i lanes = tail_mask(remaining);
    if (owner) {
      const __m128i lane32 = _mm_cmpgt_epi32(_mm_set1_epi32(remaining), _mm_setr_epi32(0, 1, 2, 3));
      const __m128i own = _mm_maskload_epi32(owner + j, lane32);
      lanes = _mm256_and_si256(lanes, _mm256_cvtepi32_epi64(_mm_cmpeq_epi32(own, _mm_set1_epi32(id))));
    }
    if (_mm256_movemask_pd(_mm256_castsi256_pd(lanes)) == 0) continue;
    const __m256d jj = lane_index(j);
    const __m256d wx = _mm256_add_pd(splat(span.start[0]), _mm256_mul_pd(jj, splat(span.step[0])));
    const __m256d wy = _mm256_add_pd(splat(span.start[1]), _mm256_mul_pd(jj, splat(span.step[1])));
    const __m256d wz = _mm256_add_pd(splat(span.start[2]), _mm256_mul_pd(jj, splat(span.step[2])));
    const __m256d nw = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(pnx, wx), _mm256_mul_pd(pny, wy)), _mm256_mul_pd(pnz, wz));
    const __m256d t = _mm256_mul_pd(_mm256_sub_pd(splat(prim.d), nw), splat(dir.inv_ns));
    __m256d ok = _mm256_and_pd(_mm256_castsi256_pd(lanes), _mm256_cmp_pd(t, zero, _CMP_GT_OQ));
    const __m256d x0 = _mm256_add_pd(wx, _mm256_mul_pd(t, sx));
    const __m256d x1 = _mm256_add_pd(wy, _mm256_mul_pd(t, sy));
    const __m256d x2 = _mm256_add_pd(wz, _mm256_mul_pd(t, sz));
    const __m256d ox = _mm256_sub_pd(x0, splat(prim.origin[0]));
    const __m256d oy = _mm256_sub_pd(x1, splat(prim.origin[1]));
    const __m256d oz = _mm256_sub_pd(x2, splat(prim.origin[2]));
    const __m256d a = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(ox, splat(prim.da[0])), _mm256_mul_pd(oy, splat(prim.da[1]))),
        _mm256_mul_pd(oz, splat(prim.da[2])));
    const __m256d bb = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(ox, splat(prim.db[0])), _mm256_mul_pd(oy, splat(prim.db[1]))),
        _mm256_mul_pd(oz, splat(prim.db[2])));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(a, zero, _CMP_GE_OQ));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(bb, zero, _CMP_GE_OQ));
    __m128i texel = _mm_setzero_si128();
    if (prim.triangle) {
      ok = _mm256_and_pd(ok, _mm256_cmp_pd(_mm256_add_pd(a, bb), one, _CMP_LE_OQ));
    } else {
      ok = _mm256_and_pd(ok, _mm256_cmp_pd(a, one, _CMP_LT_OQ));
      ok = _mm256_and_pd(ok, _mm256_cmp_pd(bb, one, _CMP_LT_OQ));
      const __m256d tc = _mm256_min_pd(_mm256_floor_pd(_mm256_mul_pd(a, cols)), col_max);
      const __m256d tr = _mm256_min_pd(_mm256_floor_pd(_mm256_mul_pd(bb, rows)), row_max);
      const __m256d idx = _mm256_and_pd(ok, _mm256_add_pd(_mm256_mul_pd(tr, cols), tc));
      texel = _mm256_cvttpd_epi32(idx);
    }
    if (_mm256_movemask_pd(ok) == 0) continue;
    __m256d nx = pnx, ny = pny, nz = pnz;
    if (prim.smooth) {
      nx = _mm256_add_pd(_mm256_add_pd(splat(prim.n0[0]), _mm256_mul_pd(a, splat(prim.dna[0]))), _mm256_mul_pd(bb, splat(prim.dnb[0])));
      ny = _mm256_add_pd(_mm256_add_pd(splat(prim.n0[1]), _mm256_mul_pd(a, splat(prim.dna[1]))), _mm256_mul_pd(bb, splat(prim.dnb[1])));
      nz = _mm256_add_pd(_mm256_add_pd(splat(prim.n0[2]), _mm256_mul_pd(a, splat(prim.dna[2]))), _mm256_mul_pd(bb, splat(prim.dnb[2])));
      const __m256d inv_n = _mm256_div_pd(
          one, _mm256_sqrt_pd(_mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(nx, nx), _mm256_mul_pd(ny, ny)), _mm256_mul_pd(nz, nz))));
      nx = _mm256_mul_pd(nx, inv_n);
      ny = _mm256_mul_pd(ny, inv_n);
      nz = _mm256_mul_pd(nz, inv_n);
    }
    const __m256d ns = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(nx, sx), _mm256_mul_pd(ny, sy)), _mm256_mul_pd(nz, sz));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(_mm256_sub_pd(zero, ns), zero, _CMP_GT_OQ));
    const __m256d lx = _mm256_sub_pd(splat(light.position[0]), x0);
    const __m256d ly = _mm256_sub_pd(splat(light.position[1]), x1);
    const __m256d lz = _mm256_sub_pd(splat(light.position[2]), x2);
    const __m256d rl2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(lx, lx), _mm256_mul_pd(ly, ly)), _mm256_mul_pd(lz, lz));
    const __m256d inv_rl = _mm256_div_pd(one, _mm256_sqrt_pd(rl2));
    const __m256d cos_i = _mm256_mul_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(nx, lx), _mm256_mul_pd(ny, ly)), _mm256_mul_pd(nz, lz)), inv_rl);
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(cos_i, zero, _CMP_GT_OQ));
    if (_mm256_movemask_pd(ok) == 0) continue;
    const __m128i slot = _mm_slli_epi32(texel, 2);
    __m256d cr = _mm256_i32gather_pd(prim.kd + 0, slot, 8);
    __m256d cg = _mm256_i32gather_pd(prim.kd + 1, slot, 8);
    __m256d cb = _mm256_i32gather_pd(prim.kd + 2, slot, 8);
    if (prim.specular) {
      const __m256d two_cos = _mm256_add_pd(cos_i, cos_i);
      const __m256d mx = _mm256_sub_pd(_mm256_mul_pd(two_cos, nx), _mm256_mul_pd(lx, inv_rl));
      const __m256d my = _mm256_sub_pd(_mm256_mul_pd(two_cos, ny), _mm256_mul_pd(ly, inv_rl));
      const __m256d mz = _mm256_sub_pd(_mm256_mul_pd(two_cos, nz), _mm256_mul_pd(lz, inv_rl));
      const __m256d cos_r = _mm256_sub_pd(
          zero, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(mx, sx), _mm256_mul_pd(my, sy)), _mm256_mul_pd(mz, sz)));
      const __m256d lobe = lobe_pd(cos_r, prim.exponent);
      cr = _mm256_add_pd(cr, _mm256_mul_pd(_mm256_i32gather_pd(prim.ks + 0, slot, 8), lobe));
      cg = _mm256_add_pd(cg, _mm256_mul_pd(_mm256_i32gather_pd(prim.ks + 1, slot, 8), lobe));
      cb = _mm256_add_pd(cb, _mm256_mul_pd(_mm256_i32gather_pd(prim.ks + 2, slot, 8), lobe));
    }
    const __m256d scale = _mm256_mul_pd(_mm256_div_pd(cos_i, rl2), splat(dir.weight));
    const __m256i store = _mm256_castpd_si256(ok);
    const __m256d add_r = _mm256_mul_pd(_mm256_mul_pd(cr, scale), splat(light.power[0]));
    const __m256d add_g = _mm256_mul_pd(_mm256_mul_pd(cg, scale), splat(light.power[1]));
    const __m256d add_b = _mm256_mul_pd(_mm256_mul_pd(cb, scale), splat(light.power[2]));
    _mm256_maskstore_pd(r + j, store, _mm256_add_pd(_mm256_maskload_pd(r + j, store), add_r));
    _mm256_maskstore_pd(g + j, store, _mm256_add_pd(_mm256_maskload_pd(g + j, store), add_g));
    _mm256_maskstore_pd(b + j, store, _mm256_add_pd(_mm256_maskload_pd(b + j, store), add_b));
  }
}

}  // namespace nlos::simd::detail
