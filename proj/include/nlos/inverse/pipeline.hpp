#pragma once

#include <utility>
#include <vector>

#include "nlos/core/stack.hpp"
#include "nlos/inverse/admm.hpp"
#include "nlos/inverse/estimate_plane.hpp"
#include "nlos/inverse/homography.hpp"
#include "nlos/inverse/tilt.hpp"
#include "nlos/inverse/track_features.hpp"

namespace nlos {

struct InversionConfig {
  DetectorConfig detector;
  PlaneSolverConfig solver;
  bool resolve_tilt = true;
  TiltSearchConfig tilt;
  double beta = 0.05;  ///< specular blur width used by the forward model
  int chart_resolution = 48;
  double chart_margin = 0.08;  ///< meters
  AdmmConfig admm{.max_iterations = 60};
};

struct PlaneInversion {
  FeatureTrackSet tracks;
  TrackingReport report;
  PlaneEstimate initial;   ///< track objective only
  PlaneEstimate estimate;  ///< after tilt resolution when enabled
  std::vector<std::pair<double, double>> tilt_profile;
  double seconds_tracking = 0.0;
  double seconds_plane = 0.0;
  double seconds_tilt = 0.0;
};

struct AlbedoInversion {
  PlaneChart chart;
  AdmmResult admm;
  double seconds_operator = 0.0;
  double seconds_admm = 0.0;
};

std::vector<VirtualSource> stack_sources(const ReflectionStack& stack);

/// Tracks, then the track-consensus plane, then (optionally) the photometric tilt search.
PlaneInversion invert_plane(const ReflectionStack& stack, const NoiseParams& noise, const InversionConfig& config = {});

/// Reflectance on a chart around the reprojected tracks.
AlbedoInversion invert_albedo(const ReflectionStack& stack, const PlaneParams& plane, const FeatureTrackSet& tracks,
                              const NoiseParams& noise, const InversionConfig& config = {});

}  // namespace nlos
