#pragma once

#include <vector>

#include "nlos/core/plane.hpp"
#include "nlos/inverse/tracks.hpp"

namespace nlos {

struct ObjectiveResult {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();  ///< d/d(theta, phi, nu)
  std::size_t dropped = 0;       ///< degenerate observations left out
  std::vector<double> spreads;   ///< per used feature: sum of squared distances to its mean
};

/// Reprojection consensus: sum over the first `top_features` tracks of
/// sum_i ||p_i - mean(p)||^2, with p_i the reprojection of observation i onto the plane.
/// `sources[k]` is the source of measurement k. The gradient is analytic.
ObjectiveResult plane_objective(const PlaneParams& params, const FeatureTrackSet& tracks,
                                const std::vector<Vec3>& sources, int top_features = 30);

}  // namespace nlos
