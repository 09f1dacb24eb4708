#include <atomic>
#include <cmath>
#include <string>

#include "nlos/core/error.hpp"
#include "nlos/render/render.hpp"
#include "parallel.hpp"
#include "primitives.hpp"

namespace nlos {

void RenderSettings::validate() const {
  NLOS_REQUIRE(epsilon > 0.0, "render epsilon must be positive");
  NLOS_REQUIRE(density > 0.0, "oracle density must be positive");
  NLOS_REQUIRE(grazing_clamp > 0.0, "grazing clamp must be positive");
  NLOS_REQUIRE(threads >= 0, "thread count must be >= 0");
}

void add_direct_bounce(ImageD& image, const WallGeometry& wall, const VirtualSource& source) {
  if (!wall.contains(source.position)) return;
  const auto [i, j] = wall.point_to_pixel(source.position);
  for (int c = 0; c < 3; ++c) image(i, j, c) += source.power[c];
}

double relative_rmse(const ImageD& a, const ImageD& reference) {
  NLOS_REQUIRE(a.same_shape(reference), "relative_rmse: shape mismatch");
  double num = 0.0;
  double den = 0.0;
  const auto x = a.data();
  const auto y = reference.data();
  for (std::size_t k = 0; k < x.size(); ++k) {
    num += (x[k] - y[k]) * (x[k] - y[k]);
    den += y[k] * y[k];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

namespace detail {

simd::WallSpan row_span(const WallGeometry& wall, int row, int col0, int count) {
  const Vec3 start = wall.pixel_to_point(row, col0);
  const Vec3 step = wall.u * wall.pixel_width();
  return {{start.x(), start.y(), start.z()}, {step.x(), step.y(), step.z()}, count};
}

void finish_image(ImageD& image, const Scene& scene, const VirtualSource& source, const RenderSettings& settings) {
  if (settings.include_direct_bounce) add_direct_bounce(image, scene.wall, source);
  if (settings.clamp_negative) {
    for (double& v : image.data()) v = std::max(v, 0.0);
  }
}

}  // namespace detail

ImageD render_oracle(const Scene& scene, const VirtualSource& source, const RenderSettings& settings,
                     RenderDiagnostics* diagnostics) {
  settings.validate();
  scene.wall.validate();
  source.validate(scene.wall);
  const WallGeometry& wall = scene.wall;
  ImageD image(wall.rows, wall.cols, 3);
  const auto patches = detail::light_patches(detail::tessellate(scene.hidden, settings.density), source);
  const simd::KernelTable& k = simd::kernels();
  const double eps2 = settings.epsilon * settings.epsilon;
  std::atomic<long> skipped{0};
  detail::parallel_bands(wall.rows, settings.threads, [&](int r0, int r1) {
    std::vector<double> buf(3 * static_cast<std::size_t>(wall.cols));
    double* R = buf.data();
    double* G = R + wall.cols;
    double* B = G + wall.cols;
    long local = 0;
    for (int i = r0; i < r1; ++i) {
      std::fill(buf.begin(), buf.end(), 0.0);
      const simd::WallSpan span = detail::row_span(wall, i, 0, wall.cols);
      local += k.oracle_rows(patches.data(), patches.size(), span, eps2, R, G, B);
      for (int j = 0; j < wall.cols; ++j) {
        image(i, j, 0) = R[j];
        image(i, j, 1) = G[j];
        image(i, j, 2) = B[j];
      }
    }
    skipped += local;
  });
  detail::finish_image(image, scene, source, settings);
  if (diagnostics) {
    diagnostics->skipped_pairs = skipped.load();
    diagnostics->patches = patches.size();
  }
  return image;
}

}  // namespace nlos
