#pragma once

#include <string>
#include <vector>

#include "nlos/core/stack.hpp"
#include "nlos/inverse/tracks.hpp"

namespace nlos {

struct DetectorConfig {
  int max_features = 0;            ///< 0 = unlimited
  double contrast_threshold = 0.02;
  double ratio = 0.8;              ///< Lowe ratio test
  double ransac_threshold_px = 2.0;
  int ransac_iterations = 2000;
  int min_inliers = 8;             ///< pairs with fewer RANSAC inliers contribute nothing
  double saturation_percentile = 0.999;  ///< 8-bit conversion maps this stack-wide percentile to 255
  double presmooth_px = 2.0;             ///< Gaussian std applied before detection, 0 = none
};

struct TrackingReport {
  int reference = -1;
  std::vector<int> keypoints;  ///< per map
  std::vector<int> inliers;    ///< per map, reference pair
  std::vector<std::string> warnings;
};

/// SIFT keypoints in every map, matched against the map with the most detections and
/// RANSAC-filtered under a per-pair homography. Tracks are keyed by reference keypoint
/// and sorted by descending match count; positions are wall meters.
/// Throws ContractViolation for fewer than 2 maps and EmptyTracks when nothing survives.
FeatureTrackSet track_features(const ReflectionStack& stack, const DetectorConfig& config = {},
                               TrackingReport* report = nullptr);

}  // namespace nlos
