#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <json.hpp>

#include "nlos/core/image.hpp"
#include "nlos/core/scene.hpp"

namespace nlos {

/// Closed interval [lo, hi]; lo == hi always yields lo.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool valid() const { return lo <= hi; }
  double at(double u) const { return lo + u * (hi - lo); }
};

/// Randomized planar digit scenes. Every draw is a function of (seed, index).
struct SceneSampler {
  std::uint64_t seed = 0;
  WallGeometry wall{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 2.0, 2.0, 64, 64};
  int grid_rows = 5;
  int grid_cols = 5;
  double grid_fraction = 0.8;

  Vec3 origin{0.0, 0.0, 0.4};  ///< canonical chart center is origin + nu * z
  double nu = 0.5;
  double chart_size = 0.6;  ///< meters, square

  Range rotation{-kPi, kPi};  ///< in-plane rotation, radians
  Range shift_x{-0.2, 0.2};  ///< 3D shift of the chart center, meters
  Range shift_y{-0.2, 0.2};
  Range shift_z{-0.2, 0.2};
  Range tilt{-kPi / 6, kPi / 6};  ///< plane tilt theta, radians
  Range azimuth{0.0, kPi};        ///< tilt azimuth phi, radians
  Range exponent{0.0, 512.0};
  Range specular_scale{0.0, 1.0};

  std::shared_ptr<const std::vector<ImageD>> digits;

  /// Throws ContractViolation on an empty range, an exponent range outside [0, 512]
  /// or a missing digit set.
  void validate() const;
};

/// The random quantities behind one scene.
struct SampledPose {
  std::size_t digit = 0;
  double rotation = 0.0;
  Vec3 shift = Vec3::Zero();
  double theta = 0.0;
  double phi = 0.0;
  double exponent = 0.0;
  double specular_scale = 0.0;
};

SampledPose sample_pose(const SceneSampler& sampler, std::size_t index);

/// Digit luminance becomes alpha_d; alpha_s is the luminance times the sampled scale.
Scene sample_scene(const SceneSampler& sampler, std::size_t index, SampledPose* pose = nullptr);

/// Scene for an explicit pose.
Scene scene_from_pose(const SceneSampler& sampler, const SampledPose& pose);

nlohmann::json pose_to_json(const SampledPose& pose);
nlohmann::json sampler_to_json(const SceneSampler& sampler);

}  // namespace nlos
