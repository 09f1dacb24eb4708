#pragma once

#include <vector>

#include "nlos/core/image.hpp"
#include "nlos/core/scene.hpp"
#include "nlos/inverse/homography.hpp"
#include "nlos/inverse/tracks.hpp"

namespace nlos {

/// Square chart on `plane` around the reprojected track points (reference observation of
/// every track), grown by `margin` meters on each side.
/// Throws ContractViolation when no track reprojects.
PlaneChart chart_from_tracks(const PlaneParams& plane, const FeatureTrackSet& tracks,
                             const std::vector<VirtualSource>& sources, int resolution, double margin);

/// Specular albedo of a planar object box-averaged onto the texels of `chart`
/// (supersample^2 points per texel, zero off the object). The chart must lie on the object's plane.
ImageD resample_specular(const PlanarObject& object, const PlaneChart& chart, int supersample = 4);

/// Same, for a chart on a different plane: each chart point is carried to the object's
/// plane through its specular image on the wall for a source at `via`. Points whose
/// reflection misses the wall count as zero.
ImageD resample_specular_via(const PlanarObject& object, const PlaneChart& chart, const Vec3& via,
                             const WallGeometry& wall, int supersample = 4);

/// 10 log10(peak^2 / MSE) over all pixels and channels; +inf for identical images.
double psnr(const ImageD& estimate, const ImageD& reference, double peak = 1.0);

}  // namespace nlos
