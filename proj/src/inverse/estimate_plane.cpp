#include "nlos/inverse/estimate_plane.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nlos/core/error.hpp"
#include "nlos/inverse/plane_objective.hpp"

namespace nlos {

PlaneEstimate estimate_plane(const FeatureTrackSet& tracks, const std::vector<VirtualSource>& sources,
                             const std::optional<PlaneParams>& init, const PlaneSolverConfig& config) {
  std::size_t usable = 0;
  for (const FeatureTrack& t : tracks.tracks) usable += t.observations.size() >= 2 ? 1 : 0;
  NLOS_REQUIRE(usable >= 2, "estimate_plane: needs at least 2 tracks with 2 or more observations");
  NLOS_REQUIRE(config.depth_range > 0.0, "estimate_plane: depth range must be positive");
  std::vector<Vec3> positions;
  positions.reserve(sources.size());
  for (const VirtualSource& s : sources) positions.push_back(s.position);

  std::vector<PlaneParams> starts;
  if (init) {
    starts.push_back(*init);
  } else {
    const double half_pi = 0.5 * kPi;
    for (double theta : {-0.6, 0.0, 0.6}) {
      for (double phi : {half_pi - 0.6, half_pi, half_pi + 0.6}) {
        for (double nu : {0.2, 0.5, 0.8}) {
          starts.push_back({theta, phi, nu * config.depth_range, config.origin});
        }
      }
    }
  }

  PlaneEstimate best;
  best.objective = std::numeric_limits<double>::infinity();
  std::string failures;
  int failed = 0;
  for (const PlaneParams& start : starts) {
    const Vec3 origin = start.origin;
    const ObjectiveFn fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      const ObjectiveResult o = plane_objective({x[0], x[1], x[2], origin}, tracks, positions, config.top_features);
      g = o.gradient;
      return o.value;
    };
    const LbfgsResult r = lbfgs_minimize(fn, Eigen::Vector3d(start.theta, start.phi, start.nu), config.lbfgs);
    const bool failed_start = !std::isfinite(r.value) || (r.line_search_failed && r.iterations == 0 && !r.converged);
    if (failed_start) {
      ++failed;
      failures += " [" + r.message + "]";
      continue;
    }
    if (r.value < best.objective) {
      best.params = {r.x[0], r.x[1], r.x[2], origin};
      best.objective = r.value;
      best.iterations = r.iterations;
    }
  }
  if (failed == static_cast<int>(starts.size())) {
    throw OptimizationFailure("estimate_plane: all " + std::to_string(starts.size()) + " starts failed:" + failures);
  }
  best.starts = static_cast<int>(starts.size());
  best.failed_starts = failed;
  best.spreads = plane_objective(best.params, tracks, positions, config.top_features).spreads;
  return best;
}

PlaneParams tilt_gauge_member(const PlaneParams& plane, double theta) {
  const double s0 = std::sin(plane.theta);
  const double s1 = std::sin(theta);
  if (std::abs(s0) < 1e-9 || std::abs(s1) < 1e-9) {
    throw DegenerateGeometry("tilt gauge: a wall-parallel plane has no intersection line");
  }
  if (std::abs(std::cos(theta)) < 1e-9) throw DegenerateGeometry("tilt gauge: perpendicular plane has no nu");
  const Vec3& o = plane.origin;
  const double along = std::cos(plane.phi) * o.x() + std::sin(plane.phi) * o.y();
  // Signed offset of the wall line along (cos phi, sin phi).
  const double line = along + std::cos(plane.theta) * (o.z() + plane.nu) / s0;
  PlaneParams out = plane;
  out.theta = theta;
  out.nu = (line - along) * s1 / std::cos(theta) - o.z();
  return out;
}

PlaneEstimate estimate_plane_fixed_tilt(const FeatureTrackSet& tracks, const std::vector<VirtualSource>& sources,
                                        double theta, const PlaneParams& init, const PlaneSolverConfig& config) {
  std::vector<Vec3> positions;
  positions.reserve(sources.size());
  for (const VirtualSource& s : sources) positions.push_back(s.position);
  const Vec3 origin = init.origin;
  const ObjectiveFn fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const ObjectiveResult o = plane_objective({theta, x[0], x[1], origin}, tracks, positions, config.top_features);
    g = o.gradient.tail<2>();
    return o.value;
  };
  const LbfgsResult r = lbfgs_minimize(fn, Eigen::Vector2d(init.phi, init.nu), config.lbfgs);
  if (!std::isfinite(r.value)) throw OptimizationFailure("fixed-tilt plane solve diverged: " + r.message);
  PlaneEstimate e;
  e.params = {theta, r.x[0], r.x[1], origin};
  e.objective = r.value;
  e.iterations = r.iterations;
  e.starts = 1;
  e.spreads = plane_objective(e.params, tracks, positions, config.top_features).spreads;
  return e;
}

}  // namespace nlos
