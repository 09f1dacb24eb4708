#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "nlos/core/scene.hpp"

namespace nlos {

struct TrackObservation {
  int measurement = 0;  ///< index into the stack / source list
  Vec3 position;        ///< wall point, meters
};

struct FeatureTrack {
  std::vector<TrackObservation> observations;
  double score = 0.0;  ///< match count
};

struct FeatureTrackSet {
  std::vector<FeatureTrack> tracks;

  bool empty() const { return tracks.empty(); }
  std::size_t size() const { return tracks.size(); }
  /// Throws ContractViolation: every track needs >= 2 observations with valid
  /// measurement indices and positions on the wall.
  void validate(const WallGeometry& wall, std::size_t measurements) const;
  /// Descending score; ties keep their relative order.
  void sort_by_score();
};

/// Exact specular tracks for a planar object: plane points drawn uniformly over the
/// object, mirror points for every source, Gaussian jitter of `jitter_px` wall pixels.
/// Observations that leave the wall are dropped, as are tracks left with fewer than 2.
FeatureTrackSet synthetic_tracks(const PlanarObject& object, const std::vector<VirtualSource>& sources,
                                 const WallGeometry& wall, int count, double jitter_px, std::uint64_t seed);

nlohmann::json tracks_to_json(const FeatureTrackSet& tracks);
FeatureTrackSet tracks_from_json(const nlohmann::json& j);

}  // namespace nlos
