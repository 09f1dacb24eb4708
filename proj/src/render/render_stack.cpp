#include <algorithm>
#include <chrono>

#include "nlos/core/error.hpp"
#include "nlos/render/stack_render.hpp"

namespace nlos {

namespace {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

}  // namespace

ReflectionStack render_stack(const Scene& scene, const std::vector<VirtualSource>& grid, const StackOptions& options) {
  NLOS_REQUIRE(!grid.empty(), "render_stack: source grid is empty");
  NLOS_REQUIRE(options.auto_exposure >= 0.0, "render_stack: auto exposure level must be >= 0");
  scene.validate();
  for (const auto& s : grid) s.validate(scene.wall);
  ReflectionStack stack;
  stack.wall = scene.wall;
  stack.direct_bounce_included = options.settings.include_direct_bounce;
  stack.seed = options.seed;
  if (const auto* obj = std::get_if<PlanarObject>(&scene.hidden)) stack.ground_truth_plane = obj->plane;

  HemisphereSampling sampling;
  if (options.renderer == RendererKind::fast) sampling = HemisphereSampling::fibonacci(options.samples);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    ImageD image = options.renderer == RendererKind::fast ? render_fast(scene, grid[k], sampling, options.settings)
                                                          : render_oracle(scene, grid[k], options.settings);
    stack.entries.push_back({grid[k], std::move(image)});
    if (options.on_map) {
      options.on_map(k, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
  }

  if (options.auto_exposure > 0.0) {
    std::vector<double> all;
    for (const auto& e : stack.entries) all.insert(all.end(), e.image.data().begin(), e.image.data().end());
    const double level = percentile(std::move(all), 0.999);
    stack.exposure = level > 0.0 ? options.auto_exposure / level : 1.0;
    for (auto& e : stack.entries) {
      for (double& v : e.image.data()) v *= stack.exposure;
    }
  }

  if (options.noise) {
    options.noise->validate();
    for (std::size_t k = 0; k < stack.entries.size(); ++k) {
      stack.entries[k].image = apply_sensor_noise(stack.entries[k].image, *options.noise, derive_seed(options.seed, k));
    }
    stack.noisy = true;
    stack.noise = options.noise;
  }
  return stack;
}

}  // namespace nlos
