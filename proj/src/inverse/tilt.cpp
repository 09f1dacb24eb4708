#include "nlos/inverse/tilt.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <limits>

#include "nlos/core/error.hpp"
#include "nlos/inverse/chart.hpp"

namespace nlos {

namespace {

std::vector<VirtualSource> stack_sources(const ReflectionStack& stack) {
  std::vector<VirtualSource> out;
  for (const StackEntry& e : stack.entries) out.push_back(e.source);
  return out;
}

SparseMatrix gradient_penalty(int rows, int cols) {
  const int t = rows * cols;
  std::vector<Eigen::Triplet<double>> tr;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int k = r * cols + c;
      if (c + 1 < cols) {
        tr.emplace_back(k, k, -1.0);
        tr.emplace_back(k, k + 1, 1.0);
      }
      if (r + 1 < rows) {
        tr.emplace_back(t + k, k, -1.0);
        tr.emplace_back(t + k, k + cols, 1.0);
      }
    }
  }
  SparseMatrix d(2 * t, t);
  d.setFromTriplets(tr.begin(), tr.end());
  return SparseMatrix(d.transpose() * d);
}

}  // namespace

ReflectionStack downsample_stack(const ReflectionStack& stack, int factor) {
  NLOS_REQUIRE(factor >= 1, "downsample factor must be positive");
  NLOS_REQUIRE(stack.wall.rows % factor == 0 && stack.wall.cols % factor == 0,
               "wall resolution must be divisible by the downsample factor");
  if (factor == 1) return stack;
  ReflectionStack out = stack;
  out.wall.rows /= factor;
  out.wall.cols /= factor;
  const double inv = 1.0 / (factor * factor);
  for (StackEntry& e : out.entries) {
    const ImageD& src = e.image;
    ImageD dst(out.wall.rows, out.wall.cols, src.channels());
    for (int r = 0; r < src.rows(); ++r) {
      for (int c = 0; c < src.cols(); ++c) {
        for (int ch = 0; ch < src.channels(); ++ch) dst(r / factor, c / factor, ch) += src(r, c, ch) * inv;
      }
    }
    e.image = std::move(dst);
  }
  return out;
}

double photometric_residual(const ReflectionStack& stack, const FeatureTrackSet& tracks, const PlaneParams& plane,
                            const NoiseParams& noise, const TiltSearchConfig& config) {
  const std::vector<VirtualSource> sources = stack_sources(stack);
  const PlaneChart chart = chart_from_tracks(plane, tracks, sources, config.chart_resolution, config.chart_margin);
  OperatorConfig oc = config.op;
  oc.gain = stack.exposure * noise.gain;
  const ForwardOperator op = ForwardOperator::from_plane(stack.wall, chart, sources, oc);

  const int channels = stack.entries.front().image.channels();
  const std::size_t n = op.measurements();
  std::vector<Eigen::MatrixXd> b(n);
  double total = 0.0;
  double outside = 0.0;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(chart.texels(), channels);
  for (std::size_t i = 0; i < n; ++i) {
    const ImageD& img = stack.entries[i].image;
    const Rgb& power = stack.entries[i].source.power;
    std::vector<char> covered(img.storage().size() / channels, 0);
    const std::vector<int>& rows = op.rows(i);
    b[i].resize(static_cast<Eigen::Index>(rows.size()), channels);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      covered[rows[k]] = 1;
      for (int ch = 0; ch < channels; ++ch) {
        const double ratio = channels == 3 && power[ch] > 0 ? power.mean() / power[ch] : 1.0;
        b[i](k, ch) = img.storage()[rows[k] * channels + ch] * ratio;
      }
    }
    for (std::size_t pix = 0; pix < covered.size(); ++pix) {
      for (int ch = 0; ch < channels; ++ch) {
        const double ratio = channels == 3 && power[ch] > 0 ? power.mean() / power[ch] : 1.0;
        const double v = img.storage()[pix * channels + ch] * ratio;
        total += v * v;
        if (!covered[pix]) outside += v * v;
      }
    }
    rhs += op.adjoint_block(i, b[i]);
  }
  NLOS_REQUIRE(total > 0, "photometric residual needs a non-zero stack");

  SparseMatrix m = op.normal_matrix();
  const double scale = std::max(m.diagonal().mean(), 1e-12);
  m += SparseMatrix(config.smoothing * scale * gradient_penalty(chart.rows, chart.cols));
  for (int t = 0; t < chart.texels(); ++t) m.coeffRef(t, t) += 1e-6 * scale;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-8);
  cg.setMaxIterations(2000);
  cg.compute(m);
  Eigen::MatrixXd x(chart.texels(), channels);
  for (int ch = 0; ch < channels; ++ch) x.col(ch) = cg.solve(rhs.col(ch));

  double inside = 0.0;
  for (std::size_t i = 0; i < n; ++i) inside += (op.forward_block(i, x) - b[i]).squaredNorm();
  return (inside + outside) / total;
}

TiltSearchResult resolve_tilt(const ReflectionStack& stack, const FeatureTrackSet& tracks, const PlaneEstimate& start,
                              const NoiseParams& noise, const TiltSearchConfig& config) {
  NLOS_REQUIRE(config.theta_min > 0 && config.theta_max > config.theta_min && config.theta_max < 0.5 * kPi,
               "tilt search range must lie inside (0, pi/2)");
  NLOS_REQUIRE(config.grid >= 3 && config.refine >= 0, "tilt search needs at least 3 grid samples");
  stack.validate();
  const std::vector<VirtualSource> sources = stack_sources(stack);
  const ReflectionStack coarse = downsample_stack(stack, config.wall_downsample);

  PlaneParams seed = start.params;
  if (seed.theta < 0) {
    seed.theta = -seed.theta;
    seed.phi += kPi;
  }
  if (std::abs(std::sin(seed.theta)) < 1e-6) seed.theta = config.theta_min;

  TiltSearchResult result;
  double best_score = std::numeric_limits<double>::infinity();
  auto evaluate = [&](double theta) {
    double score = std::numeric_limits<double>::infinity();
    try {
      const PlaneParams init = tilt_gauge_member(seed, theta);
      PlaneEstimate e = estimate_plane_fixed_tilt(tracks, sources, theta, init, config.solver);
      score = photometric_residual(coarse, tracks, e.params, noise, config);
      if (score < best_score) {
        best_score = score;
        result.estimate = std::move(e);
      }
    } catch (const DegenerateGeometry&) {
    } catch (const OptimizationFailure&) {
    }
    result.profile.emplace_back(theta, score);
    return score;
  };

  const double step = (config.theta_max - config.theta_min) / (config.grid - 1);
  int best_k = 0;
  double best_grid = std::numeric_limits<double>::infinity();
  for (int k = 0; k < config.grid; ++k) {
    const double s = evaluate(config.theta_min + k * step);
    if (s < best_grid) {
      best_grid = s;
      best_k = k;
    }
  }
  if (!std::isfinite(best_grid)) throw OptimizationFailure("tilt search: no candidate tilt produced a valid fit");

  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = config.theta_min + std::max(0, best_k - 1) * step;
  double b = config.theta_min + std::min(config.grid - 1, best_k + 1) * step;
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = evaluate(x1);
  double f2 = evaluate(x2);
  for (int it = 0; it < config.refine; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = evaluate(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = evaluate(x2);
    }
  }
  result.estimate.starts = static_cast<int>(result.profile.size());
  return result;
}

}  // namespace nlos
