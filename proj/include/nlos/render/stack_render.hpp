#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nlos/core/stack.hpp"
#include "nlos/render/render.hpp"

namespace nlos {

enum class RendererKind { fast, oracle };

struct StackOptions {
  RendererKind renderer = RendererKind::fast;
  int samples = 10000;
  RenderSettings settings;
  std::optional<NoiseParams> noise;  ///< noise applied per map when set
  /// When > 0 the clean stack is scaled so that its 99.9th-percentile value equals this
  /// level before noise; the scale is recorded as ReflectionStack::exposure.
  double auto_exposure = 0.0;
  std::uint64_t seed = 0;
  /// Called after each map with (index, seconds).
  std::function<void(std::size_t, double)> on_map;
};

/// One map per source with identical settings. Map k uses noise seed derive_seed(seed, k).
ReflectionStack render_stack(const Scene& scene, const std::vector<VirtualSource>& grid, const StackOptions& options);

}  // namespace nlos
