#pragma once

#include "nlos/core/image.hpp"
#include "nlos/core/scene.hpp"

namespace nlos {

struct OrthogonalView {
  ImageD albedo;  ///< rows x cols x 3 diffuse albedo of the first hit
  ImageD depth;   ///< rows x cols x 1 hit distance along +z, +inf where nothing is hit
};

/// Orthographic view of the hidden scene along the wall normal, sampled on the wall pixel grid.
OrthogonalView render_orthogonal_view(const Scene& scene);

/// Copy of `depth` with +inf replaced by 0, the on-disk background sentinel.
ImageD depth_for_file(const ImageD& depth);

}  // namespace nlos
