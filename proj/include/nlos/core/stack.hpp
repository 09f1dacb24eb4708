#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nlos/core/image.hpp"
#include "nlos/core/noise.hpp"
#include "nlos/core/plane.hpp"
#include "nlos/core/wall.hpp"

namespace nlos {

struct StackEntry {
  VirtualSource source;
  ImageD image;  ///< rows x cols x 3, normalized intensity units
};

/// N indirect reflection maps sharing one wall.
struct ReflectionStack {
  WallGeometry wall;
  std::vector<StackEntry> entries;
  bool direct_bounce_included = false;
  bool noisy = false;
  std::uint64_t seed = 0;
  double exposure = 1.0;  ///< linear scale applied to the rendered maps before noise
  std::optional<NoiseParams> noise;
  std::optional<PlaneParams> ground_truth_plane;  ///< embedded when simulated from a planar scene

  std::size_t size() const { return entries.size(); }
  /// Throws ContractViolation when an invariant fails: N >= 1, shared (rows, cols, 3),
  /// sources on the wall, pixels >= 0 unless the stack is flagged noisy.
  void validate() const;
};

}  // namespace nlos
