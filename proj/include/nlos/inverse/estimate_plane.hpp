#pragma once

#include <optional>
#include <vector>

#include "nlos/core/plane.hpp"
#include "nlos/core/wall.hpp"
#include "nlos/inverse/lbfgs.hpp"
#include "nlos/inverse/tracks.hpp"

namespace nlos {

struct PlaneSolverConfig {
  int top_features = 30;
  double depth_range = 1.0;  ///< scales the nu values of the multi-start grid
  Vec3 origin{0.0, 0.0, 0.4};
  LbfgsConfig lbfgs;
};

struct PlaneEstimate {
  PlaneParams params;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> spreads;
  int starts = 0;
  int failed_starts = 0;
};

/// Minimize the reprojection consensus objective with L-BFGS. With `init` a single
/// start is run from it; otherwise the best of a 3x3x3 grid over
/// theta in {-0.6, 0, 0.6}, phi in {pi/2 - 0.6, pi/2, pi/2 + 0.6}, nu in {0.2, 0.5, 0.8} * depth_range.
/// Throws ContractViolation for fewer than 2 usable tracks and OptimizationFailure when every start fails.
PlaneEstimate estimate_plane(const FeatureTrackSet& tracks, const std::vector<VirtualSource>& sources,
                             const std::optional<PlaneParams>& init = std::nullopt,
                             const PlaneSolverConfig& config = {});

/// The objective depends on the plane only through its intersection line with the wall
/// and cos(theta)/depth, so tilting about that line leaves every reprojected track
/// consistent. Returns the member of that family with tilt `theta` (same phi).
/// Throws DegenerateGeometry when either tilt is within 1e-9 of wall-parallel.
PlaneParams tilt_gauge_member(const PlaneParams& plane, double theta);

/// estimate_plane with theta held at `theta`, optimizing (phi, nu) from `init`.
PlaneEstimate estimate_plane_fixed_tilt(const FeatureTrackSet& tracks, const std::vector<VirtualSource>& sources,
                                        double theta, const PlaneParams& init, const PlaneSolverConfig& config = {});

}  // namespace nlos
