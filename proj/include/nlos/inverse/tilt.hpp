#pragma once

#include <utility>
#include <vector>

#include "nlos/core/noise.hpp"
#include "nlos/core/stack.hpp"
#include "nlos/inverse/estimate_plane.hpp"
#include "nlos/inverse/forward_operator.hpp"

namespace nlos {

struct TiltSearchConfig {
  double theta_min = 0.05;
  double theta_max = 1.3;
  int grid = 13;               ///< coarse samples over [theta_min, theta_max]
  int refine = 10;             ///< golden-section steps around the best sample
  int wall_downsample = 2;     ///< box-average the maps by this factor before scoring
  int chart_resolution = 24;
  double chart_margin = 0.05;  ///< meters
  double smoothing = 1e-2;     ///< quadratic gradient penalty, relative to the mean diagonal of A^T A
  OperatorConfig op;           ///< beta and anisotropy; the gain is taken from the stack and noise
  PlaneSolverConfig solver;
};

struct TiltSearchResult {
  PlaneEstimate estimate;
  std::vector<std::pair<double, double>> profile;  ///< (theta, normalized residual) for every evaluation
};

/// Box-average every map of the stack over factor x factor pixel blocks. The wall keeps its
/// extent; rows and cols must be divisible by the factor.
ReflectionStack downsample_stack(const ReflectionStack& stack, int factor);

/// Resolve the tilt left free by the track objective: for each candidate tilt the plane is
/// re-fitted to the tracks with theta fixed, the reflectance is solved by smoothed least
/// squares under the forward model, and the tilt with the smallest residual over every
/// wall pixel of every map wins.
TiltSearchResult resolve_tilt(const ReflectionStack& stack, const FeatureTrackSet& tracks, const PlaneEstimate& start,
                              const NoiseParams& noise, const TiltSearchConfig& config = {});

/// Data residual of the smoothed least-squares fit for one plane, normalized by the
/// total measurement energy. The stack is used at full resolution.
double photometric_residual(const ReflectionStack& stack, const FeatureTrackSet& tracks, const PlaneParams& plane,
                            const NoiseParams& noise, const TiltSearchConfig& config);

}  // namespace nlos
