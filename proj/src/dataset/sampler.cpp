#include "nlos/dataset/sampler.hpp"

#include <cmath>

#include "nlos/core/error.hpp"
#include "nlos/core/noise.hpp"
#include "nlos/core/scene_io.hpp"

namespace nlos {

namespace {

/// Uniform in [0, 1) from the top 53 bits, identical on every platform.
double unit(CounterRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

nlohmann::json range_to_json(const Range& r) { return nlohmann::json::array({r.lo, r.hi}); }

}  // namespace

void SceneSampler::validate() const {
  wall.validate();
  NLOS_REQUIRE(grid_rows >= 1 && grid_cols >= 1, "sampler grid must be at least 1x1");
  NLOS_REQUIRE(grid_fraction > 0.0 && grid_fraction <= 1.0, "sampler grid fraction must be in (0, 1]");
  NLOS_REQUIRE(chart_size > 0.0, "sampler chart size must be positive");
  for (const Range* r : {&rotation, &shift_x, &shift_y, &shift_z, &tilt, &azimuth, &exponent, &specular_scale}) {
    NLOS_REQUIRE(r->valid() && std::isfinite(r->lo) && std::isfinite(r->hi), "sampler ranges must be non-empty");
  }
  NLOS_REQUIRE(exponent.lo >= 0.0 && exponent.hi <= 512.0, "exponent range must lie within [0, 512]");
  NLOS_REQUIRE(specular_scale.lo >= 0.0 && specular_scale.hi <= 1.0, "specular scale range must lie within [0, 1]");
  NLOS_REQUIRE(tilt.lo > -0.5 * kPi && tilt.hi < 0.5 * kPi, "tilt range must stay below 90 degrees");
  NLOS_REQUIRE(digits && !digits->empty(), "sampler has no digit images");
}

SampledPose sample_pose(const SceneSampler& s, std::size_t index) {
  NLOS_REQUIRE(s.digits && !s.digits->empty(), "sampler has no digit images");
  CounterRng rng(derive_seed(s.seed, index), 0);
  SampledPose p;
  p.digit = static_cast<std::size_t>(unit(rng) * static_cast<double>(s.digits->size()));
  p.rotation = s.rotation.at(unit(rng));
  p.shift.x() = s.shift_x.at(unit(rng));
  p.shift.y() = s.shift_y.at(unit(rng));
  p.shift.z() = s.shift_z.at(unit(rng));
  p.theta = s.tilt.at(unit(rng));
  p.phi = s.azimuth.at(unit(rng));
  p.exponent = s.exponent.at(unit(rng));
  p.specular_scale = s.specular_scale.at(unit(rng));
  return p;
}

Scene scene_from_pose(const SceneSampler& s, const SampledPose& pose) {
  s.validate();
  NLOS_REQUIRE(pose.digit < s.digits->size(), "pose digit index out of range");
  const ImageD& digit = (*s.digits)[pose.digit];
  NLOS_REQUIRE(digit.channels() == 1, "digit images must be single-channel");

  PhongMaterial m;
  m.diffuse = AlbedoMap::zeros(digit.rows(), digit.cols());
  m.specular = AlbedoMap::zeros(digit.rows(), digit.cols());
  for (int r = 0; r < digit.rows(); ++r) {
    for (int c = 0; c < digit.cols(); ++c) {
      const double l = digit(r, c);
      m.diffuse.at(r, c) = Rgb::Constant(l);
      m.specular.at(r, c) = Rgb::Constant(l * pose.specular_scale);
    }
  }
  m.exponent = pose.exponent;

  PlanarObject obj;
  obj.plane = {pose.theta, pose.phi, s.nu + pose.shift.z(), s.origin + Vec3(pose.shift.x(), pose.shift.y(), 0.0)};
  obj.rotation = pose.rotation;
  obj.width_m = s.chart_size;
  obj.height_m = s.chart_size;
  obj.material = std::move(m);

  Scene scene;
  scene.wall = s.wall;
  scene.sources = source_grid(s.wall, s.grid_rows, s.grid_cols, s.grid_fraction);
  scene.hidden = std::move(obj);
  scene.validate();
  return scene;
}

Scene sample_scene(const SceneSampler& sampler, std::size_t index, SampledPose* pose) {
  const SampledPose p = sample_pose(sampler, index);
  if (pose) *pose = p;
  return scene_from_pose(sampler, p);
}

nlohmann::json pose_to_json(const SampledPose& p) {
  return {{"digit", p.digit},
          {"rotation", p.rotation},
          {"shift", {p.shift.x(), p.shift.y(), p.shift.z()}},
          {"theta", p.theta},
          {"phi", p.phi},
          {"exponent", p.exponent},
          {"specular_scale", p.specular_scale}};
}

nlohmann::json sampler_to_json(const SceneSampler& s) {
  return {{"seed", s.seed},
          {"wall", wall_to_json(s.wall)},
          {"grid", {s.grid_rows, s.grid_cols}},
          {"grid_fraction", s.grid_fraction},
          {"origin", {s.origin.x(), s.origin.y(), s.origin.z()}},
          {"nu", s.nu},
          {"chart_size", s.chart_size},
          {"rotation", range_to_json(s.rotation)},
          {"shift_x", range_to_json(s.shift_x)},
          {"shift_y", range_to_json(s.shift_y)},
          {"shift_z", range_to_json(s.shift_z)},
          {"tilt", range_to_json(s.tilt)},
          {"azimuth", range_to_json(s.azimuth)},
          {"exponent", range_to_json(s.exponent)},
          {"specular_scale", range_to_json(s.specular_scale)},
          {"digit_count", s.digits ? s.digits->size() : 0}};
}

}  // namespace nlos
