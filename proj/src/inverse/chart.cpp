#include "nlos/inverse/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "nlos/core/error.hpp"
#include "nlos/inverse/mirror.hpp"

namespace nlos {

PlaneChart chart_from_tracks(const PlaneParams& plane, const FeatureTrackSet& tracks,
                             const std::vector<VirtualSource>& sources, int resolution, double margin) {
  NLOS_REQUIRE(resolution >= 1 && margin >= 0, "chart resolution and margin must be positive");
  const auto [ea, eb] = plane_chart_basis(plane.normal());
  const Vec3 v = plane.point();
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  int used = 0;
  for (const FeatureTrack& t : tracks.tracks) {
    for (const TrackObservation& o : t.observations) {
      NLOS_REQUIRE(o.measurement >= 0 && static_cast<std::size_t>(o.measurement) < sources.size(),
                   "track observation refers to a missing source");
      try {
        const Vec3 p = reproject_to_plane(o.position, sources[o.measurement].position, plane);
        const Vec2 ab((p - v).dot(ea), (p - v).dot(eb));
        if (!ab.allFinite()) continue;
        lo = lo.cwiseMin(ab);
        hi = hi.cwiseMax(ab);
        ++used;
      } catch (const DegenerateGeometry&) {
      }
    }
  }
  NLOS_REQUIRE(used > 0, "no track observation reprojects onto the plane");
  const double side = std::max(hi.x() - lo.x(), hi.y() - lo.y()) + 2.0 * margin;
  PlaneChart chart;
  chart.plane = plane;
  chart.offset = 0.5 * (lo + hi);
  chart.width_m = side;
  chart.height_m = side;
  chart.rows = resolution;
  chart.cols = resolution;
  return chart;
}

namespace {

template <typename Map>
ImageD resample_with(const PlanarObject& object, const PlaneChart& chart, int supersample, Map&& to_object) {
  NLOS_REQUIRE(supersample >= 1, "supersample must be positive");
  const ChartFrame obj = object.frame();
  const ChartFrame frame = chart.frame();
  const AlbedoMap& spec = object.material.specular;
  const int tr = object.material.rows();
  const int tc = object.material.cols();
  ImageD out(chart.rows, chart.cols, 3);
  const double inv = 1.0 / (supersample * supersample);
  for (int r = 0; r < chart.rows; ++r) {
    for (int c = 0; c < chart.cols; ++c) {
      Rgb acc = Rgb::Zero();
      for (int i = 0; i < supersample; ++i) {
        for (int j = 0; j < supersample; ++j) {
          const double rr = r - 0.5 + (i + 0.5) / supersample;
          const double cc = c - 0.5 + (j + 0.5) / supersample;
          const Vec2 ab = frame.from_texel(rr, cc, chart.rows, chart.cols);
          const std::optional<Vec3> p = to_object(frame.point(ab.x(), ab.y()));
          if (!p) continue;
          const Vec2 t = obj.to_texel(obj.coords(*p), tr, tc);
          const int ti = static_cast<int>(std::floor(t.x() + 0.5));
          const int tj = static_cast<int>(std::floor(t.y() + 0.5));
          if (ti < 0 || tj < 0 || ti >= tr || tj >= tc) continue;
          acc += spec.at(spec.is_constant() ? 0 : ti, spec.is_constant() ? 0 : tj);
        }
      }
      for (int ch = 0; ch < 3; ++ch) out(r, c, ch) = acc[ch] * inv;
    }
  }
  return out;
}

}  // namespace

ImageD resample_specular(const PlanarObject& object, const PlaneChart& chart, int supersample) {
  NLOS_REQUIRE(normal_angle(object.plane.normal(), chart.plane.normal()) < 1e-9 &&
                   std::abs((object.plane.point() - chart.plane.point()).dot(chart.plane.normal())) < 1e-9,
               "chart and object must share a plane");
  return resample_with(object, chart, supersample, [](const Vec3& p) { return std::optional<Vec3>(p); });
}

ImageD resample_specular_via(const PlanarObject& object, const PlaneChart& chart, const Vec3& via,
                             const WallGeometry& wall, int supersample) {
  return resample_with(object, chart, supersample, [&](const Vec3& p) -> std::optional<Vec3> {
    const std::optional<Vec3> c = specular_mirror_point(via, p, chart.plane, wall);
    if (!c) return std::nullopt;
    try {
      return reproject_to_plane(*c, via, object.plane);
    } catch (const DegenerateGeometry&) {
      return std::nullopt;
    }
  });
}

double psnr(const ImageD& estimate, const ImageD& reference, double peak) {
  NLOS_REQUIRE(estimate.same_shape(reference) && !estimate.empty(), "PSNR needs two non-empty images of one shape");
  NLOS_REQUIRE(peak > 0, "PSNR peak must be positive");
  double se = 0.0;
  for (std::size_t k = 0; k < estimate.size(); ++k) {
    const double d = estimate.storage()[k] - reference.storage()[k];
    se += d * d;
  }
  const double mse = se / static_cast<double>(estimate.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace nlos
