#pragma once

// Inner loops of the two renderers. Each kernel walks a row span of wall pixels;
// the scalar variants are the reference, ISA variants must agree with them to
// rounding (see tests/simd_equivalence_test.cpp).

#include <cstddef>
#include <string_view>

namespace nlos::simd {

enum class Isa { scalar, avx2, neon };

/// Wall pixels point(j) = start + j * step for j in [0, count).
struct WallSpan {
  double start[3];
  double step[3];
  int count;
};

/// One tessellated surface patch as seen from one source; everything that does
/// not depend on the receiving wall pixel is folded in.
struct OraclePatch {
  double x[3];       ///< centroid
  double n[3];       ///< unit shading normal
  double mirror[3];  ///< mirror of the source direction about n
  double kd[3];      ///< alpha_d / pi * cos_i / r_xl^2 * area * power
  double ks[3];      ///< alpha_s * (e + 2) / (2 pi) * cos_i / r_xl^2 * area * power
  double exponent;
  int specular;      ///< nonzero when any ks > 0
};

/// Planar primitive for the direction-sampled renderer.
/// Hit point x of the ray w + t s; chart coordinates a = (x - origin).da, b = (x - origin).db.
/// Rectangles accept [0,1)^2 and look up a texel; triangles accept a, b >= 0, a + b <= 1
/// and use texel 0.
struct FastPrimitive {
  double n[3];  ///< geometric unit normal, toward the wall
  double d;     ///< plane offset: n . x = d
  double origin[3];
  double da[3];
  double db[3];
  int triangle;  ///< 0 rectangle, 1 triangle
  int tex_rows;
  int tex_cols;
  const double* kd;  ///< per texel {r, g, b, pad}: alpha_d / pi
  const double* ks;  ///< per texel {r, g, b, pad}: alpha_s * (e + 2) / (2 pi)
  double exponent;
  int specular;
  int smooth;        ///< shading normal = normalize(n0 + a * dna + b * dnb)
  double n0[3];
  double dna[3];
  double dnb[3];
};

/// Per-direction constants for one primitive.
struct FastDirection {
  double s[3];     ///< unit sample direction into the hidden volume
  double inv_ns;   ///< 1 / (n . s)
  double weight;   ///< quadrature weight times the area-to-solid-angle Jacobian (r_xw^2 removed)
};

struct FastLight {
  double position[3];
  double power[3];
};

/// Accumulate `count` patches over one span into planar RGB rows.
/// Returns the number of (patch, pixel) pairs skipped because r_xw^2 < eps2.
using OracleRowsFn = long (*)(const OraclePatch* patches, std::size_t count, const WallSpan& span, double eps2,
                              double* r, double* g, double* b);

/// Shade one primitive along one direction over a span. When `owner` is non-null only
/// pixels with owner[j] == id are shaded (depth-buffered scenes).
using FastRowFn = void (*)(const FastPrimitive& prim, const FastDirection& dir, const FastLight& light,
                           const WallSpan& span, const int* owner, int id, double* r, double* g, double* b);

struct KernelTable {
  Isa isa;
  OracleRowsFn oracle_rows;
  FastRowFn fast_row;
};

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);

/// Best supported ISA, unless the NLOS_SIMD environment variable names another
/// supported one ("scalar", "avx2", "neon").
const KernelTable& kernels();
/// Throws std::invalid_argument when `isa` is not available on this machine/build.
const KernelTable& kernels(Isa isa);

namespace detail {
long oracle_rows_scalar(const OraclePatch*, std::size_t, const WallSpan&, double, double*, double*, double*);
void fast_row_scalar(const FastPrimitive&, const FastDirection&, const FastLight&, const WallSpan&, const int*, int,
                     double*, double*, double*);
#if defined(NLOS_HAVE_AVX2)
long oracle_rows_avx2(const OraclePatch*, std::size_t, const WallSpan&, double, double*, double*, double*);
void fast_row_avx2(const FastPrimitive&, const FastDirection&, const FastLight&, const WallSpan&, const int*, int,
                   double*, double*, double*);
#endif
#if defined(NLOS_HAVE_NEON)
long oracle_rows_neon(const OraclePatch*, std::size_t, const WallSpan&, double, double*, double*, double*);
void fast_row_neon(const FastPrimitive&, const FastDirection&, const FastLight&, const WallSpan&, const int*, int,
                   double*, double*, double*);
#endif
}  // namespace detail

}  // namespace nlos::simd
