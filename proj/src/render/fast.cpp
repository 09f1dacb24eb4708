#include <cmath>
#include <limits>
#include <string>

#include "nlos/core/error.hpp"
#include "nlos/render/render.hpp"
#include "parallel.hpp"
#include "primitives.hpp"

namespace nlos {

namespace {

struct Footprint {
  int r0, r1, c0, c1;  // inclusive pixel range, empty when r0 > r1 or c0 > c1
};

/// Bounding pixel range of the primitive outline projected onto the wall along -s.
Footprint footprint(const WallGeometry& wall, const std::vector<Vec3>& outline, const Vec3& s) {
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = -rmin;
  double cmin = rmin;
  double cmax = -rmin;
  for (const Vec3& x : outline) {
    const Vec3 w = x - (x.z() / s.z()) * s;
    const Vec2 rc = wall.point_to_pixel_continuous(w);
    rmin = std::min(rmin, rc.x());
    rmax = std::max(rmax, rc.x());
    cmin = std::min(cmin, rc.y());
    cmax = std::max(cmax, rc.y());
  }
  auto lo = [](double v, int n) { return static_cast<int>(std::clamp(std::floor(v), -1.0, static_cast<double>(n))); };
  auto hi = [](double v, int n) { return static_cast<int>(std::clamp(std::ceil(v), -1.0, static_cast<double>(n))); };
  return {std::max(0, lo(rmin, wall.rows)), std::min(wall.rows - 1, hi(rmax, wall.rows)),
          std::max(0, lo(cmin, wall.cols)), std::min(wall.cols - 1, hi(cmax, wall.cols))};
}

/// Per-primitive constants for one direction; false when the primitive is edge-on.
bool direction_for(const simd::FastPrimitive& p, const Vec3& s, double weight, double clamp, simd::FastDirection& d) {
  const double ns = p.n[0] * s.x() + p.n[1] * s.y() + p.n[2] * s.z();
  if (std::abs(ns) < 1e-15) return false;
  d.s[0] = s.x();
  d.s[1] = s.y();
  d.s[2] = s.z();
  d.inv_ns = 1.0 / ns;
  d.weight = weight / std::max(clamp, std::abs(ns));
  return true;
}

/// Ray parameter of the hit of w + t s on primitive p, or +inf when it misses.
/// Uses the same arithmetic as the shading kernels.
double hit_distance(const simd::FastPrimitive& p, const simd::FastDirection& d, const double w[3]) {
  const double t = (p.d - (p.n[0] * w[0] + p.n[1] * w[1] + p.n[2] * w[2])) * d.inv_ns;
  if (!(t > 0.0)) return std::numeric_limits<double>::infinity();
  const double ox = w[0] + t * d.s[0] - p.origin[0];
  const double oy = w[1] + t * d.s[1] - p.origin[1];
  const double oz = w[2] + t * d.s[2] - p.origin[2];
  const double a = ox * p.da[0] + oy * p.da[1] + oz * p.da[2];
  const double b = ox * p.db[0] + oy * p.db[1] + oz * p.db[2];
  const bool inside = p.triangle ? (a >= 0.0 && b >= 0.0 && a + b <= 1.0) : (a >= 0.0 && a < 1.0 && b >= 0.0 && b < 1.0);
  return inside ? t : std::numeric_limits<double>::infinity();
}

simd::FastLight make_light(const VirtualSource& source) {
  return {{source.position.x(), source.position.y(), source.position.z()},
          {source.power[0], source.power[1], source.power[2]}};
}

/// Shade rows [r0, r1) into planar band buffers (R, G, B each (r1 - r0) x cols).
void shade_band(const Scene& scene, const detail::FastScene& fs, const HemisphereSampling& sampling,
                const simd::FastLight& light, const RenderSettings& settings, const simd::KernelTable& k, int r0,
                int r1, double* R, double* G, double* B) {
  const WallGeometry& wall = scene.wall;
  const int cols = wall.cols;
  const std::size_t band = static_cast<std::size_t>(r1 - r0) * cols;
  std::vector<double> depth;
  std::vector<int> owner;
  if (fs.depth_buffered) {
    depth.assign(band, std::numeric_limits<double>::infinity());
    owner.assign(band, -1);
  }
  std::vector<simd::FastDirection> dirs(fs.prims.size());
  std::vector<Footprint> feet(fs.prims.size());
  std::vector<char> active(fs.prims.size());
  for (int k_dir = 0; k_dir < sampling.count(); ++k_dir) {
    const Vec3& s = sampling.directions[static_cast<std::size_t>(k_dir)];
    const double weight = sampling.weights[static_cast<std::size_t>(k_dir)];
    for (std::size_t p = 0; p < fs.prims.size(); ++p) {
      active[p] = direction_for(fs.prims[p], s, weight, settings.grazing_clamp, dirs[p]);
      if (!active[p]) continue;
      Footprint f = footprint(wall, fs.outlines[p], s);
      f.r0 = std::max(f.r0, r0);
      f.r1 = std::min(f.r1, r1 - 1);
      feet[p] = f;
      active[p] = f.r0 <= f.r1 && f.c0 <= f.c1;
    }
    if (fs.depth_buffered) {
      for (std::size_t p = 0; p < fs.prims.size(); ++p) {
        if (!active[p]) continue;
        const Footprint& f = feet[p];
        for (int i = f.r0; i <= f.r1; ++i) {
          const simd::WallSpan span = detail::row_span(wall, i, f.c0, f.c1 - f.c0 + 1);
          const std::size_t row = static_cast<std::size_t>(i - r0) * cols;
          for (int j = 0; j < span.count; ++j) {
            const double w[3] = {span.start[0] + j * span.step[0], span.start[1] + j * span.step[1],
                                 span.start[2] + j * span.step[2]};
            const double t = hit_distance(fs.prims[p], dirs[p], w);
            const std::size_t idx = row + static_cast<std::size_t>(f.c0 + j);
            if (t < depth[idx]) {
              depth[idx] = t;
              owner[idx] = static_cast<int>(p);
            }
          }
        }
      }
    }
    for (std::size_t p = 0; p < fs.prims.size(); ++p) {
      if (!active[p]) continue;
      const Footprint& f = feet[p];
      for (int i = f.r0; i <= f.r1; ++i) {
        const simd::WallSpan span = detail::row_span(wall, i, f.c0, f.c1 - f.c0 + 1);
        const std::size_t off = static_cast<std::size_t>(i - r0) * cols + static_cast<std::size_t>(f.c0);
        k.fast_row(fs.prims[p], dirs[p], light, span, fs.depth_buffered ? owner.data() + off : nullptr,
                   static_cast<int>(p), R + off, G + off, B + off);
      }
    }
    if (fs.depth_buffered) {
      for (std::size_t p = 0; p < fs.prims.size(); ++p) {
        if (!active[p]) continue;
        const Footprint& f = feet[p];
        for (int i = f.r0; i <= f.r1; ++i) {
          const std::size_t off = static_cast<std::size_t>(i - r0) * cols;
          std::fill(depth.begin() + static_cast<std::ptrdiff_t>(off + f.c0),
                    depth.begin() + static_cast<std::ptrdiff_t>(off + f.c1 + 1),
                    std::numeric_limits<double>::infinity());
          std::fill(owner.begin() + static_cast<std::ptrdiff_t>(off + f.c0),
                    owner.begin() + static_cast<std::ptrdiff_t>(off + f.c1 + 1), -1);
        }
      }
    }
  }
}

/// Re-run one pixel direction by direction to name the first sample that turns it non-finite.
[[noreturn]] void report_non_finite(const Scene& scene, const detail::FastScene& fs,
                                    const HemisphereSampling& sampling, const simd::FastLight& light,
                                    const RenderSettings& settings, int row, int col) {
  const simd::KernelTable& scalar = simd::kernels(simd::Isa::scalar);
  double acc[3] = {0.0, 0.0, 0.0};
  for (int k = 0; k < sampling.count(); ++k) {
    for (std::size_t p = 0; p < fs.prims.size(); ++p) {
      simd::FastDirection d{};
      if (!direction_for(fs.prims[p], sampling.directions[k], sampling.weights[k], settings.grazing_clamp, d)) continue;
      const simd::WallSpan span = detail::row_span(scene.wall, row, col, 1);
      scalar.fast_row(fs.prims[p], d, light, span, nullptr, 0, &acc[0], &acc[1], &acc[2]);
      if (!std::isfinite(acc[0] + acc[1] + acc[2])) {
        throw RenderError("render_fast: non-finite value at pixel (" + std::to_string(row) + ", " +
                          std::to_string(col) + "), sample " + std::to_string(k) + ", primitive " +
                          std::to_string(p));
      }
    }
  }
  throw RenderError("render_fast: non-finite value at pixel (" + std::to_string(row) + ", " + std::to_string(col) +
                    ")");
}

}  // namespace

ImageD render_fast(const Scene& scene, const VirtualSource& source, const HemisphereSampling& sampling,
                   const RenderSettings& settings, RenderDiagnostics* diagnostics) {
  NLOS_REQUIRE(sampling.count() >= 1, "render_fast: sampling has no directions");
  NLOS_REQUIRE(sampling.weights.size() == sampling.directions.size(), "render_fast: one weight per direction");
  for (const Vec3& s : sampling.directions) {
    NLOS_REQUIRE(s.z() > 0.0, "render_fast: sample directions must point into the hidden volume");
  }
  settings.validate();
  scene.wall.validate();
  source.validate(scene.wall);
  const WallGeometry& wall = scene.wall;
  ImageD image(wall.rows, wall.cols, 3);
  detail::FastScene fs;
  detail::build_fast_scene(scene.hidden, fs);
  const simd::FastLight light = make_light(source);
  const simd::KernelTable& k = simd::kernels();
  if (!fs.prims.empty()) {
    detail::parallel_bands(wall.rows, settings.threads, [&](int r0, int r1) {
      const std::size_t band = static_cast<std::size_t>(r1 - r0) * wall.cols;
      std::vector<double> buf(3 * band, 0.0);
      shade_band(scene, fs, sampling, light, settings, k, r0, r1, buf.data(), buf.data() + band,
                 buf.data() + 2 * band);
      for (int i = r0; i < r1; ++i) {
        for (int j = 0; j < wall.cols; ++j) {
          const std::size_t idx = static_cast<std::size_t>(i - r0) * wall.cols + j;
          image(i, j, 0) = buf[idx];
          image(i, j, 1) = buf[band + idx];
          image(i, j, 2) = buf[2 * band + idx];
        }
      }
    });
  }
  for (int i = 0; i < wall.rows; ++i) {
    for (int j = 0; j < wall.cols; ++j) {
      if (!std::isfinite(image(i, j, 0) + image(i, j, 1) + image(i, j, 2))) {
        report_non_finite(scene, fs, sampling, light, settings, i, j);
      }
    }
  }
  detail::finish_image(image, scene, source, settings);
  if (diagnostics) {
    diagnostics->samples = static_cast<std::size_t>(sampling.count());
    diagnostics->patches = fs.prims.size();
  }
  return image;
}

}  // namespace nlos
