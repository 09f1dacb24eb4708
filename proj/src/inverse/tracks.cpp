#include "nlos/inverse/tracks.hpp"

#include <algorithm>
#include <random>

#include "nlos/core/error.hpp"
#include "nlos/core/noise.hpp"
#include "nlos/inverse/mirror.hpp"

namespace nlos {

void FeatureTrackSet::validate(const WallGeometry& wall, std::size_t measurements) const {
  for (const FeatureTrack& t : tracks) {
    NLOS_REQUIRE(t.observations.size() >= 2, "every feature track needs at least 2 observations");
    for (const TrackObservation& o : t.observations) {
      NLOS_REQUIRE(o.measurement >= 0 && static_cast<std::size_t>(o.measurement) < measurements,
                   "track observation references a missing measurement");
      NLOS_REQUIRE(wall.contains(o.position), "track observation lies outside the wall");
    }
  }
}

void FeatureTrackSet::sort_by_score() {
  std::stable_sort(tracks.begin(), tracks.end(),
                   [](const FeatureTrack& a, const FeatureTrack& b) { return a.score > b.score; });
}

FeatureTrackSet synthetic_tracks(const PlanarObject& object, const std::vector<VirtualSource>& sources,
                                 const WallGeometry& wall, int count, double jitter_px, std::uint64_t seed) {
  NLOS_REQUIRE(count >= 1, "synthetic_tracks: count must be >= 1");
  NLOS_REQUIRE(jitter_px >= 0.0, "synthetic_tracks: jitter must be >= 0");
  const ChartFrame frame = object.frame();
  CounterRng rng(seed, 0);
  std::uniform_real_distribution<double> ua(-0.5 * frame.width_m, 0.5 * frame.width_m);
  std::uniform_real_distribution<double> ub(-0.5 * frame.height_m, 0.5 * frame.height_m);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FeatureTrackSet out;
  for (int f = 0; f < count; ++f) {
    const double a = ua(rng);
    const double b = ub(rng);
    Vec3 p = frame.point(a, b);
    p -= (p - object.plane.point()).dot(object.plane.normal()) * object.plane.normal();
    FeatureTrack track;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const double ju = gauss(rng) * jitter_px * wall.pixel_width();
      const double jv = gauss(rng) * jitter_px * wall.pixel_height();
      const auto c = specular_mirror_point(sources[k].position, p, object.plane, wall);
      if (!c) continue;
      const Vec3 pos = *c + ju * wall.u + jv * wall.v;
      if (!wall.contains(pos)) continue;
      track.observations.push_back({static_cast<int>(k), pos});
    }
    track.score = static_cast<double>(track.observations.size());
    if (track.observations.size() >= 2) out.tracks.push_back(std::move(track));
  }
  out.sort_by_score();
  return out;
}

nlohmann::json tracks_to_json(const FeatureTrackSet& tracks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const FeatureTrack& t : tracks.tracks) {
    nlohmann::json obs = nlohmann::json::array();
    for (const TrackObservation& o : t.observations) {
      obs.push_back({{"measurement", o.measurement}, {"position", {o.position.x(), o.position.y(), o.position.z()}}});
    }
    arr.push_back({{"score", t.score}, {"observations", obs}});
  }
  return {{"tracks", arr}};
}

FeatureTrackSet tracks_from_json(const nlohmann::json& j) {
  FeatureTrackSet out;
  try {
    for (const auto& t : j.at("tracks")) {
      FeatureTrack track;
      track.score = t.at("score").get<double>();
      for (const auto& o : t.at("observations")) {
        const auto p = o.at("position").get<std::vector<double>>();
        if (p.size() != 3) throw FormatError("track position must have 3 components");
        track.observations.push_back({o.at("measurement").get<int>(), Vec3(p[0], p[1], p[2])});
      }
      out.tracks.push_back(std::move(track));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("track set: ") + e.what());
  }
  return out;
}

}  // namespace nlos
