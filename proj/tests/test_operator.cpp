#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nlos/core/error.hpp"
#include "nlos/inverse/admm.hpp"
#include "nlos/inverse/chart.hpp"
#include "nlos/inverse/forward_operator.hpp"

using namespace nlos;

namespace {

WallGeometry small_wall(int res) {
  WallGeometry w;
  w.rows = w.cols = res;
  return w;
}

/// Chart covering the wall texel-for-pixel, so an identity homography lines texels up with pixels.
PlaneChart wall_chart(const WallGeometry& wall) {
  PlaneChart c;
  c.plane = {0.0, 0.0, 0.5, Vec3(0, 0, 0.4)};
  c.width_m = wall.width_m;
  c.height_m = wall.height_m;
  c.rows = wall.rows;
  c.cols = wall.cols;
  return c;
}

ForwardOperator identity_operator(const WallGeometry& wall) {
  const PlaneChart chart = wall_chart(wall);
  return ForwardOperator(wall, chart, {Mat3::Identity()},
                         {std::vector<TexelBlur>(static_cast<std::size_t>(chart.texels()))}, {}, {});
}

ImageD random_image(int rows, int cols, int channels, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImageD img(rows, cols, channels);
  for (double& v : img.storage()) v = u(rng);
  return img;
}

/// A tilted plane seen by a 3 x 3 source grid, with a chart around the plane point.
ForwardOperator geometric_operator(double beta, bool flat_field, int chart_res = 24) {
  WallGeometry wall = small_wall(64);
  PlaneChart chart;
  chart.plane = {0.25, 0.8, 0.4, Vec3(0, 0, 0.4)};
  chart.width_m = chart.height_m = 0.4;
  chart.rows = chart.cols = chart_res;
  OperatorConfig cfg;
  cfg.beta = beta;
  cfg.flat_field = flat_field;
  return ForwardOperator::from_plane(wall, chart, source_grid(wall, 3, 3, 0.5), cfg);
}

double dot(const std::vector<ImageD>& a, const std::vector<ImageD>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].size(); ++k) s += a[i].storage()[k] * b[i].storage()[k];
  }
  return s;
}

double dot(const ImageD& a, const ImageD& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.storage()[k] * b.storage()[k];
  return s;
}

ReflectionStack stack_from(const WallGeometry& wall, const std::vector<ImageD>& maps) {
  ReflectionStack s;
  s.wall = wall;
  for (const ImageD& m : maps) s.entries.push_back({VirtualSource{}, m});
  return s;
}

}  // namespace

TEST_CASE("zero blur with an identity homography reproduces the chart") {
  const WallGeometry wall = small_wall(16);
  const ForwardOperator op = identity_operator(wall);
  std::mt19937_64 rng(1);
  const ImageD x = random_image(16, 16, 3, rng);
  const std::vector<ImageD> y = apply_forward(op, x);
  REQUIRE(y.size() == 1);
  for (std::size_t k = 0; k < x.size(); ++k) REQUIRE(std::abs(y[0].storage()[k] - x.storage()[k]) <= 1e-14);
}

TEST_CASE("impulse response is a spot at the mapped texel carrying the warped mass") {
  const ForwardOperator op = geometric_operator(0.0, false, 32);
  const PlaneChart& chart = op.chart();
  ImageD x(chart.rows, chart.cols, 1);
  const int r0 = 16, c0 = 15;
  x(r0, c0) = 1.0;
  const std::vector<ImageD> y = apply_forward(op, x);
  const WallGeometry& wall = op.wall();
  const double texel_area = (chart.width_m / chart.cols) * (chart.height_m / chart.rows);
  const double pixel_area = wall.pixel_width() * wall.pixel_height();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Mat3& h = op.homographies()[i];
    const Vec2 ab = chart.texel_coords(r0, c0);
    const Vec2 center = apply_homography(h, ab);
    // Area scale of the chart-to-wall map at the impulse.
    const double e = 1e-5;
    const Vec2 da = (apply_homography(h, ab + Vec2(e, 0)) - apply_homography(h, ab - Vec2(e, 0))) / (2 * e);
    const Vec2 db = (apply_homography(h, ab + Vec2(0, e)) - apply_homography(h, ab - Vec2(0, e))) / (2 * e);
    const double jac = std::abs(da.x() * db.y() - da.y() * db.x());
    double mass = 0.0;
    Vec2 centroid = Vec2::Zero();
    for (int r = 0; r < wall.rows; ++r) {
      for (int c = 0; c < wall.cols; ++c) {
        const double v = y[i](r, c);
        mass += v;
        centroid += v * wall_coords(wall, wall.pixel_to_point(r, c));
      }
    }
    centroid /= mass;
    CHECK(mass * pixel_area == doctest::Approx(jac * texel_area).epsilon(0.01));
    CHECK((centroid - center).norm() <= 0.5 * wall.pixel_width());
  }
}

TEST_CASE("adjoint passes the dot-product test") {
  const ForwardOperator op = geometric_operator(0.05, true);
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ImageD x = random_image(op.chart().rows, op.chart().cols, 3, rng);
    std::vector<ImageD> y;
    for (std::size_t i = 0; i < op.measurements(); ++i) y.push_back(random_image(64, 64, 3, rng));
    const double lhs = dot(apply_forward(op, x), y);
    const double rhs = dot(x, apply_adjoint(op, y));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("forward operator is linear") {
  const ForwardOperator op = geometric_operator(0.05, true);
  std::mt19937_64 rng(3);
  const ImageD x = random_image(op.chart().rows, op.chart().cols, 3, rng);
  const ImageD z = random_image(op.chart().rows, op.chart().cols, 3, rng);
  const double alpha = 1.7;
  ImageD comb = x;
  for (std::size_t k = 0; k < comb.size(); ++k) comb.storage()[k] = alpha * x.storage()[k] + z.storage()[k];
  const auto a = apply_forward(op, comb);
  const auto ax = apply_forward(op, x);
  const auto az = apply_forward(op, z);
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      worst = std::max(worst, std::abs(a[i].storage()[k] - alpha * ax[i].storage()[k] - az[i].storage()[k]));
      scale = std::max(scale, std::abs(a[i].storage()[k]));
    }
  }
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("normal matrix equals the sum of A_i^T A_i") {
  const ForwardOperator op = geometric_operator(0.05, true, 12);
  std::mt19937_64 rng(4);
  const ImageD x = random_image(12, 12, 1, rng);
  const Eigen::MatrixXd direct = chart_to_matrix(apply_adjoint(op, apply_forward(op, x)));
  const Eigen::MatrixXd viaN = op.normal_matrix() * chart_to_matrix(x);
  CHECK((direct - viaN).norm() <= 1e-10 * direct.norm());
}

TEST_CASE("operator rejects singular homographies and shape mismatches") {
  const WallGeometry wall = small_wall(8);
  const PlaneChart chart = wall_chart(wall);
  const std::vector<TexelBlur> blur(static_cast<std::size_t>(chart.texels()));
  CHECK_THROWS_AS(ForwardOperator(wall, chart, {Mat3::Zero()}, {blur}, {}, {}), ContractViolation);
  const ForwardOperator op = identity_operator(wall);
  CHECK_THROWS_AS(apply_forward(op, ImageD(7, 8, 3)), ContractViolation);
}

TEST_CASE("noiseless identity problem without regularization returns the measurement") {
  const WallGeometry wall = small_wall(16);
  const ForwardOperator op = identity_operator(wall);
  std::mt19937_64 rng(5);
  const ImageD x = random_image(16, 16, 3, rng);
  AdmmConfig cfg;
  cfg.lambda = 0.0;
  cfg.abs_tolerance = cfg.rel_tolerance = 1e-9;
  cfg.max_iterations = 500;
  const AdmmResult r = solve_reflectance(stack_from(wall, {x}), op, NoiseParams{}, cfg);
  CHECK(psnr(r.x, x) >= 60.0);
  CHECK(r.converged);
  for (double v : r.x.data()) CHECK(v >= 0.0);
}

TEST_CASE("very large TV weight flattens the estimate") {
  const WallGeometry wall = small_wall(16);
  const ForwardOperator op = identity_operator(wall);
  std::mt19937_64 rng(6);
  const ImageD x = random_image(16, 16, 1, rng);
  ImageD x3(16, 16, 3);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      for (int ch = 0; ch < 3; ++ch) x3(r, c, ch) = x(r, c);
    }
  }
  AdmmConfig cfg;
  cfg.lambda = 1e4;
  cfg.max_iterations = 400;
  const AdmmResult r = solve_reflectance(stack_from(wall, {x3}), op, NoiseParams{}, cfg);
  double mean = 0.0;
  for (double v : r.x.data()) mean += v;
  mean /= static_cast<double>(r.x.size());
  double spread = 0.0;
  for (double v : r.x.data()) spread = std::max(spread, std::abs(v - mean));
  double input_spread = 0.0;
  for (double v : x.data()) input_spread = std::max(input_spread, std::abs(v - 0.5));
  CHECK(spread <= 0.02 * input_spread);
  CHECK(mean > 0.0);
}

TEST_CASE("residual monotonicity check works on block means") {
  std::vector<double> down(100);
  for (std::size_t k = 0; k < down.size(); ++k) down[k] = std::exp(-0.05 * static_cast<double>(k)) * (1.0 + 0.1 * (k % 2));
  CHECK(residuals_decreasing(down));
  std::vector<double> up = down;
  std::reverse(up.begin(), up.end());
  CHECK_FALSE(residuals_decreasing(up));
}

TEST_CASE("ADMM configuration is validated") {
  AdmmConfig cfg;
  cfg.nonnegative = false;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg = AdmmConfig{};
  cfg.rho = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
}

TEST_CASE("chart resampling of an aligned object reproduces its texture") {
  PlanarObject o;
  o.plane = {0.2, 0.5, 0.4, Vec3(0, 0, 0.4)};
  o.width_m = o.height_m = 0.4;
  o.material.specular = AlbedoMap::zeros(8, 8);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) o.material.specular.at(r, c) = Rgb::Constant(0.1 * ((r + 2 * c) % 9));
  }
  PlaneChart chart;
  chart.plane = o.plane;
  chart.width_m = chart.height_m = 0.4;
  chart.rows = chart.cols = 8;
  const ImageD img = resample_specular(o, chart);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) CHECK(img(r, c, 0) == doctest::Approx(o.material.specular.at(r, c)[0]).epsilon(1e-12));
  }
  CHECK(std::isinf(psnr(img, img)));
}

TEST_CASE("lobe blur conserves the mass of an interior impulse") {
  const ForwardOperator sharp = geometric_operator(0.0, false, 32);
  const ForwardOperator blurred = geometric_operator(0.02, false, 32);
  ImageD x(32, 32, 1);
  x(16, 15) = 1.0;
  const auto a = apply_forward(sharp, x);
  const auto b = apply_forward(blurred, x);
  const Vec2 ab = sharp.chart().texel_coords(16, 15);
  int checked = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    // Spots near the wall border lose mass off the wall, which is not a blur property.
    if (apply_homography(sharp.homographies()[i], ab).cwiseAbs().maxCoeff() > 0.6) continue;
    ++checked;
    double ma = 0.0, mb = 0.0;
    for (double v : a[i].data()) ma += v;
    for (double v : b[i].data()) mb += v;
    CHECK(mb == doctest::Approx(ma).epsilon(0.03));
  }
  CHECK(checked >= 4);
}
