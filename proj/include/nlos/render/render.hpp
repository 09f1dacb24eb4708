#pragma once

#include <cstddef>

#include "nlos/core/image.hpp"
#include "nlos/core/scene.hpp"
#include "nlos/render/sampling.hpp"

namespace nlos {

struct RenderSettings {
  bool include_direct_bounce = false;
  bool clamp_negative = false;
  double epsilon = 1e-7;   ///< minimum patch-to-point distance, meters
  double density = 200.0;  ///< oracle tessellation, patches per meter
  double grazing_clamp = 1e-3;
  int threads = 1;         ///< 0 = hardware concurrency

  void validate() const;
};

struct RenderDiagnostics {
  long skipped_pairs = 0;  ///< (patch, pixel) pairs closer than epsilon
  std::size_t patches = 0;
  std::size_t samples = 0;
};

/// Brute-force quadrature of the third-bounce surface integral over a
/// tessellation of the hidden scene. Occlusion is ignored.
ImageD render_oracle(const Scene& scene, const VirtualSource& source, const RenderSettings& settings = {},
                     RenderDiagnostics* diagnostics = nullptr);

/// Direction-sampled renderer: for every sample direction the hidden scene is
/// projected onto the wall along -s and each wall pixel shades its hit point.
/// Throws ContractViolation for an empty sampling and RenderError when a pixel
/// turns non-finite.
ImageD render_fast(const Scene& scene, const VirtualSource& source, const HemisphereSampling& sampling,
                   const RenderSettings& settings = {}, RenderDiagnostics* diagnostics = nullptr);

/// Add the direct bounce of `source` (its power, deposited into the pixel containing l).
void add_direct_bounce(ImageD& image, const WallGeometry& wall, const VirtualSource& source);

/// Relative RMSE ||a - b|| / ||b|| over all pixels and channels.
double relative_rmse(const ImageD& a, const ImageD& reference);

}  // namespace nlos
