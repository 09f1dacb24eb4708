#include "nlos/inverse/pipeline.hpp"

#include <chrono>

#include "nlos/inverse/chart.hpp"
#include "nlos/inverse/forward_operator.hpp"

namespace nlos {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

}  // namespace

std::vector<VirtualSource> stack_sources(const ReflectionStack& stack) {
  std::vector<VirtualSource> out;
  out.reserve(stack.size());
  for (const StackEntry& e : stack.entries) out.push_back(e.source);
  return out;
}

PlaneInversion invert_plane(const ReflectionStack& stack, const NoiseParams& noise, const InversionConfig& config) {
  stack.validate();
  const std::vector<VirtualSource> sources = stack_sources(stack);
  PlaneInversion out;
  auto t = Clock::now();
  out.tracks = track_features(stack, config.detector, &out.report);
  out.seconds_tracking = since(t);

  t = Clock::now();
  out.initial = estimate_plane(out.tracks, sources, std::nullopt, config.solver);
  out.estimate = out.initial;
  out.seconds_plane = since(t);

  if (config.resolve_tilt) {
    t = Clock::now();
    TiltSearchConfig tc = config.tilt;
    tc.op.beta = config.beta;
    tc.solver = config.solver;
    TiltSearchResult r = resolve_tilt(stack, out.tracks, out.initial, noise, tc);
    out.estimate = std::move(r.estimate);
    out.tilt_profile = std::move(r.profile);
    out.seconds_tilt = since(t);
  }
  return out;
}

AlbedoInversion invert_albedo(const ReflectionStack& stack, const PlaneParams& plane, const FeatureTrackSet& tracks,
                              const NoiseParams& noise, const InversionConfig& config) {
  const std::vector<VirtualSource> sources = stack_sources(stack);
  AlbedoInversion out;
  auto t = Clock::now();
  out.chart = chart_from_tracks(plane, tracks, sources, config.chart_resolution, config.chart_margin);
  OperatorConfig oc = config.tilt.op;
  oc.beta = config.beta;
  oc.gain = stack.exposure * noise.gain;
  const ForwardOperator op = ForwardOperator::from_plane(stack.wall, out.chart, sources, oc);
  out.seconds_operator = since(t);
  t = Clock::now();
  out.admm = solve_reflectance(stack, op, noise, config.admm);
  out.seconds_admm = since(t);
  return out;
}

}  // namespace nlos
