#pragma once

#include <array>
#include <vector>

#include "nlos/core/image.hpp"
#include "nlos/core/scene.hpp"
#include "nlos/render/render.hpp"
#include "nlos/simd/kernels.hpp"

namespace nlos::detail {

/// Flat surface element of the oracle tessellation, before the source is known.
struct SurfacePatch {
  Vec3 x;
  Vec3 n;  ///< unit shading normal toward the wall
  double area;
  Rgb alpha_d;
  Rgb alpha_s;
  double exponent;
};

/// Planar charts: texel-aligned patches, each texel split k x k with
/// k = ceil(texel_size * density). Meshes: triangles split until area <= (1/density)^2.
std::vector<SurfacePatch> tessellate(const HiddenScene& hidden, double density);

/// Fold the source-dependent factors into kernel patches; patches facing away
/// from the source are dropped.
std::vector<simd::OraclePatch> light_patches(const std::vector<SurfacePatch>& patches, const VirtualSource& source);

/// Primitives for the direction-sampled renderer. Texel tables are owned here and
/// referenced by pointer from `prims`, so the object must outlive its use and not be copied.
struct FastScene {
  std::vector<simd::FastPrimitive> prims;
  std::vector<std::vector<Vec3>> outlines;  ///< corner points per primitive, for footprints
  std::vector<std::vector<double>> tables;
  bool depth_buffered = false;              ///< several primitives may cover one pixel

  FastScene() = default;
  FastScene(const FastScene&) = delete;
  FastScene& operator=(const FastScene&) = delete;
};

void build_fast_scene(const HiddenScene& hidden, FastScene& out);

/// Span over `count` pixels of one wall row starting at column col0.
simd::WallSpan row_span(const WallGeometry& wall, int row, int col0, int count);
/// Direct bounce and clamping shared by both renderers.
void finish_image(ImageD& image, const Scene& scene, const VirtualSource& source, const RenderSettings& settings);

}  // namespace nlos::detail
