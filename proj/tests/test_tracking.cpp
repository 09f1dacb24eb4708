#include <doctest.h>

#include <algorithm>

#include "nlos/core/error.hpp"
#include "nlos/core/noise.hpp"
#include "nlos/inverse/mirror.hpp"
#include "nlos/inverse/track_features.hpp"
#include "nlos/render/stack_render.hpp"
#include "support.hpp"

using namespace nlos;

namespace {

WallGeometry wall_at(int res) {
  WallGeometry w;
  w.rows = w.cols = res;
  return w;
}

struct Rendered {
  Scene scene;
  std::vector<VirtualSource> grid;
  ReflectionStack stack;
};

/// Glossy textured plane seen from a 3 x 3 grid at 128^2.
const Rendered& textured_stack() {
  static const Rendered r = [] {
    Rendered out;
    out.scene.wall = wall_at(128);
    out.scene.hidden = test::blob_object({0.3, 0.7, 0.45, Vec3(0, 0, 0.4)}, 0.4, 64, 500.0);
    out.grid = source_grid(out.scene.wall, 3, 3, 0.5);
    out.scene.sources = out.grid;
    StackOptions so;
    so.samples = 20000;
    so.noise = NoiseParams{};
    so.auto_exposure = 1.0;
    so.seed = 3;
    out.stack = render_stack(out.scene, out.grid, so);
    return out;
  }();
  return r;
}

}  // namespace

TEST_CASE("identical maps produce tracks with coincident observations") {
  const Rendered& r = textured_stack();
  ReflectionStack same = r.stack;
  for (StackEntry& e : same.entries) e.image = r.stack.entries[4].image;
  const FeatureTrackSet tracks = track_features(same);
  REQUIRE(tracks.size() >= 10);
  double worst = 0.0;
  for (const FeatureTrack& t : tracks.tracks) {
    for (const TrackObservation& o : t.observations) {
      worst = std::max(worst, (o.position - t.observations.front().position).norm());
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("pure noise yields no tracks") {
  const WallGeometry wall = wall_at(128);
  ReflectionStack s;
  s.wall = wall;
  for (int k = 0; k < 9; ++k) {
    ImageD img(128, 128, 3);
    s.entries.push_back({VirtualSource{}, apply_sensor_noise(img, NoiseParams{}, derive_seed(11, k))});
  }
  CHECK_THROWS_AS(track_features(s), EmptyTracks);
}

TEST_CASE("tracks on a textured plane follow the mirror geometry") {
  const Rendered& r = textured_stack();
  TrackingReport report;
  const FeatureTrackSet tracks = track_features(r.stack, {}, &report);
  tracks.validate(r.stack.wall, r.stack.size());
  CHECK(tracks.size() >= 10);
  REQUIRE(report.reference >= 0);
  const PlaneParams& plane = std::get<PlanarObject>(r.scene.hidden).plane;
  std::size_t total = 0;
  std::size_t close = 0;
  for (const FeatureTrack& t : tracks.tracks) {
    const auto ref = std::find_if(t.observations.begin(), t.observations.end(),
                                  [&](const TrackObservation& o) { return o.measurement == report.reference; });
    REQUIRE(ref != t.observations.end());
    const Vec3 p = reproject_to_plane(ref->position, r.grid[ref->measurement].position, plane);
    for (const TrackObservation& o : t.observations) {
      if (&o == &*ref) continue;
      ++total;
      const auto c = specular_mirror_point(r.grid[o.measurement].position, p, plane, r.stack.wall);
      if (c && (*c - o.position).norm() <= r.stack.wall.pixel_width()) ++close;
    }
  }
  REQUIRE(total > 0);
  CHECK(static_cast<double>(close) >= 0.8 * static_cast<double>(total));
}

TEST_CASE("tracking needs at least two maps") {
  ReflectionStack s;
  s.wall = wall_at(16);
  s.entries.push_back({VirtualSource{}, ImageD(16, 16, 3)});
  CHECK_THROWS_AS(track_features(s), ContractViolation);
}
