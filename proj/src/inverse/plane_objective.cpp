#include "nlos/inverse/plane_objective.hpp"

#include "nlos/core/error.hpp"
#include "nlos/inverse/mirror.hpp"

namespace nlos {

ObjectiveResult plane_objective(const PlaneParams& params, const FeatureTrackSet& tracks,
                                const std::vector<Vec3>& sources, int top_features) {
  NLOS_REQUIRE(!tracks.empty(), "plane_objective: no tracks");
  NLOS_REQUIRE(top_features >= 1, "plane_objective: top_features must be >= 1");
  ObjectiveResult out;
  const std::size_t used = std::min(tracks.size(), static_cast<std::size_t>(top_features));
  std::vector<Reprojection> reps;
  for (std::size_t f = 0; f < used; ++f) {
    reps.clear();
    for (const TrackObservation& o : tracks.tracks[f].observations) {
      NLOS_REQUIRE(o.measurement >= 0 && static_cast<std::size_t>(o.measurement) < sources.size(),
                   "plane_objective: observation references a missing source");
      try {
        reps.push_back(reproject_with_jacobian(o.position, sources[static_cast<std::size_t>(o.measurement)], params));
      } catch (const DegenerateGeometry&) {
        ++out.dropped;
      }
    }
    if (reps.empty()) {
      out.spreads.push_back(0.0);
      continue;
    }
    Vec3 mean = Vec3::Zero();
    for (const Reprojection& r : reps) mean += r.point;
    mean /= static_cast<double>(reps.size());
    double spread = 0.0;
    for (const Reprojection& r : reps) {
      const Vec3 d = r.point - mean;
      spread += d.squaredNorm();
      // the mean's own derivative drops out because the deviations sum to zero
      out.gradient += 2.0 * r.jacobian.transpose() * d;
    }
    out.value += spread;
    out.spreads.push_back(spread);
  }
  return out;
}

}  // namespace nlos
