#include "nlos/inverse/forward_operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlos/core/error.hpp"
#include "nlos/inverse/mirror.hpp"

namespace nlos {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix build_blur(const PlaneChart& chart, const std::vector<TexelBlur>& blur, double support) {
  const double tw = chart.width_m / chart.cols;
  const double th = chart.height_m / chart.rows;
  const double floor_std = 0.25 * std::min(tw, th);
  std::vector<Triplet> triplets;
  std::vector<Triplet> column;
  for (int r = 0; r < chart.rows; ++r) {
    for (int c = 0; c < chart.cols; ++c) {
      const int t = r * chart.cols + c;
      const TexelBlur& b = blur[t];
      if (b.major < floor_std) {
        triplets.emplace_back(t, t, 1.0);
        continue;
      }
      const double major = b.major;
      const double minor = std::max(b.minor, floor_std);
      const double ca = std::cos(b.angle);
      const double sa = std::sin(b.angle);
      const int rr = static_cast<int>(std::ceil(support * major / th));
      const int rc = static_cast<int>(std::ceil(support * major / tw));
      column.clear();
      double total = 0.0;
      for (int r2 = std::max(0, r - rr); r2 <= std::min(chart.rows - 1, r + rr); ++r2) {
        const double dy = -(r2 - r) * th;
        for (int c2 = std::max(0, c - rc); c2 <= std::min(chart.cols - 1, c + rc); ++c2) {
          const double dx = (c2 - c) * tw;
          const double d1 = (dx * ca + dy * sa) / major;
          const double d2 = (-dx * sa + dy * ca) / minor;
          const double q = d1 * d1 + d2 * d2;
          if (q > support * support) continue;
          const double w = std::exp(-0.5 * q);
          column.emplace_back(r2 * chart.cols + c2, t, w);
          total += w;
        }
      }
      for (const Triplet& e : column) triplets.emplace_back(e.row(), e.col(), e.value() / total);
    }
  }
  SparseMatrix k(chart.texels(), chart.texels());
  k.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

}  // namespace

ForwardOperator::ForwardOperator(const WallGeometry& wall, const PlaneChart& chart, std::vector<Mat3> homographies,
                                 const std::vector<std::vector<TexelBlur>>& blur,
                                 const std::vector<std::vector<double>>& gain,
                                 const std::vector<std::vector<char>>& valid, double support)
    : wall_(wall), chart_(chart), homographies_(std::move(homographies)), blur_(blur) {
  wall.validate();
  NLOS_REQUIRE(chart.rows > 0 && chart.cols > 0 && chart.width_m > 0 && chart.height_m > 0,
               "plane chart needs a positive resolution and extent");
  NLOS_REQUIRE(support > 0, "kernel support must be positive");
  const std::size_t n = homographies_.size();
  const std::size_t pixels = static_cast<std::size_t>(wall.rows) * wall.cols;
  const auto texels = static_cast<std::size_t>(chart.texels());
  NLOS_REQUIRE(n >= 1, "forward operator needs at least one measurement");
  NLOS_REQUIRE(blur_.size() == n, "one blur table per measurement required");
  NLOS_REQUIRE(gain.empty() || gain.size() == n, "one gain table per measurement required");
  NLOS_REQUIRE(valid.empty() || valid.size() == n, "one validity mask per measurement required");

  blur_mat_.reserve(n);
  warp_.reserve(n);
  rows_.resize(n);
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < n; ++i) {
    const Mat3& h = homographies_[i];
    NLOS_REQUIRE(h.allFinite() && std::abs(h.determinant()) > 1e-12,
                 "homography " + std::to_string(i) + " is not invertible");
    NLOS_REQUIRE(blur_[i].size() == texels, "blur table size must equal the chart texel count");
    for (const TexelBlur& b : blur_[i]) {
      NLOS_REQUIRE(std::isfinite(b.major) && std::isfinite(b.minor) && std::isfinite(b.angle) && b.major >= 0 &&
                       b.minor >= 0,
                   "blur stds must be finite and non-negative");
    }
    const bool has_gain = !gain.empty() && !gain[i].empty();
    const bool has_valid = !valid.empty() && !valid[i].empty();
    NLOS_REQUIRE(!has_gain || gain[i].size() == pixels, "gain table size must equal the wall pixel count");
    NLOS_REQUIRE(!has_valid || valid[i].size() == pixels, "validity mask size must equal the wall pixel count");

    blur_mat_.push_back(build_blur(chart, blur_[i], support));

    const Mat3 hinv = h.inverse();
    triplets.clear();
    std::vector<int>& rows = rows_[i];
    for (int r = 0; r < wall.rows; ++r) {
      for (int c = 0; c < wall.cols; ++c) {
        const std::size_t pix = static_cast<std::size_t>(r) * wall.cols + c;
        if (has_valid && !valid[i][pix]) continue;
        const double g = has_gain ? gain[i][pix] : 1.0;
        if (g == 0.0) continue;
        const Vec2 ab = apply_homography(hinv, wall_coords(wall, wall.pixel_to_point(r, c)));
        if (!ab.allFinite()) continue;
        const Vec2 tc = chart.to_texel(ab);
        const double r0 = std::floor(tc.x());
        const double c0 = std::floor(tc.y());
        if (r0 < -1 || c0 < -1 || r0 >= chart.rows || c0 >= chart.cols) continue;
        const double fr = tc.x() - r0;
        const double fc = tc.y() - c0;
        const int row = static_cast<int>(rows.size());
        bool any = false;
        for (int dr = 0; dr < 2; ++dr) {
          for (int dc = 0; dc < 2; ++dc) {
            const int rr = static_cast<int>(r0) + dr;
            const int cc = static_cast<int>(c0) + dc;
            if (rr < 0 || cc < 0 || rr >= chart.rows || cc >= chart.cols) continue;
            const double w = (dr ? fr : 1.0 - fr) * (dc ? fc : 1.0 - fc);
            if (w == 0.0) continue;
            triplets.emplace_back(row, rr * chart.cols + cc, g * w);
            any = true;
          }
        }
        if (any) rows.push_back(static_cast<int>(pix));
      }
    }
    SparseMatrix w(static_cast<Eigen::Index>(rows.size()), chart.texels());
    w.setFromTriplets(triplets.begin(), triplets.end());
    warp_.push_back(std::move(w));
    blur_t_.emplace_back(blur_mat_.back().transpose());
    warp_t_.emplace_back(warp_.back().transpose());
  }
}

ForwardOperator ForwardOperator::from_plane(const WallGeometry& wall, const PlaneChart& chart,
                                            const std::vector<VirtualSource>& sources, const OperatorConfig& config) {
  NLOS_REQUIRE(config.beta >= 0 && std::isfinite(config.beta), "beta must be finite and non-negative");
  NLOS_REQUIRE(config.gain > 0 && std::isfinite(config.gain), "operator gain must be positive");
  const PlaneParams& plane = chart.plane;
  const Vec3 n = plane.normal();
  const Vec3 v = plane.point();
  const ChartFrame frame = chart.frame();
  const std::size_t pixels = static_cast<std::size_t>(wall.rows) * wall.cols;
  const double lobe = 1.0 + 2.0 * config.beta * config.beta;

  std::vector<Mat3> homographies;
  std::vector<std::vector<TexelBlur>> blur(sources.size());
  std::vector<std::vector<double>> gain(sources.size());
  std::vector<std::vector<char>> valid(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const Vec3& l = sources[i].position;
    homographies.push_back(homography_from_plane(plane, sources[i], wall));

    const double h = (l - v).dot(n);
    const Vec3 image = l - 2.0 * h * n;
    const double power = sources[i].power.mean();
    gain[i].assign(pixels, 0.0);
    valid[i].assign(pixels, 0);
    for (int r = 0; r < wall.rows; ++r) {
      for (int c = 0; c < wall.cols; ++c) {
        const Vec3 w = wall.pixel_to_point(r, c);
        const double k = (w - v).dot(n);
        if (h * k <= 0.0 || std::abs(h + k) < 1e-12) continue;
        const std::size_t pix = static_cast<std::size_t>(r) * wall.cols + c;
        valid[i][pix] = 1;
        gain[i][pix] = config.flat_field ? config.gain * power * lobe / (w - image).squaredNorm() : config.gain;
      }
    }

    blur[i].resize(static_cast<std::size_t>(chart.texels()));
    if (config.beta == 0.0) continue;
    for (int r = 0; r < chart.rows; ++r) {
      for (int c = 0; c < chart.cols; ++c) {
        const Vec3 p = frame.texel_center(r, c, chart.rows, chart.cols);
        const auto hit = specular_mirror_point(l, p, plane, wall);
        if (!hit) continue;
        const Vec3 out = *hit - p;
        const double r1 = (p - l).norm();
        const double r2 = out.norm();
        const double sigma = config.beta * r1 * r2 / (r1 + r2);
        const double cos_i = std::max(0.1, std::abs(n.dot(out)) / r2);
        TexelBlur& b = blur[i][static_cast<std::size_t>(r) * chart.cols + c];
        b.major = config.anisotropic ? sigma / cos_i : sigma;
        b.minor = sigma;
        b.angle = std::atan2(out.dot(frame.axis_b), out.dot(frame.axis_a));
      }
    }
  }
  return ForwardOperator(wall, chart, std::move(homographies), blur, gain, valid, config.support);
}

Eigen::MatrixXd ForwardOperator::forward_block(std::size_t i, const Eigen::MatrixXd& x) const {
  return warp_[i] * (blur_mat_[i] * x);
}

Eigen::MatrixXd ForwardOperator::adjoint_block(std::size_t i, const Eigen::MatrixXd& y) const {
  return blur_t_[i] * (warp_t_[i] * y);
}

SparseMatrix ForwardOperator::normal_matrix() const {
  SparseMatrix m(chart_.texels(), chart_.texels());
  for (std::size_t i = 0; i < warp_.size(); ++i) {
    const SparseMatrix gram = warp_t_[i] * warp_[i];
    m += SparseMatrix(blur_t_[i] * SparseMatrix(gram * blur_mat_[i]));
  }
  return m;
}

Eigen::MatrixXd chart_to_matrix(const ImageD& x) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(x.rows()) * x.cols(), x.channels());
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      for (int ch = 0; ch < x.channels(); ++ch) m(r * x.cols() + c, ch) = x(r, c, ch);
    }
  }
  return m;
}

ImageD matrix_to_chart(const Eigen::MatrixXd& m, int rows, int cols) {
  NLOS_REQUIRE(m.rows() == static_cast<Eigen::Index>(rows) * cols, "matrix rows must equal the texel count");
  ImageD x(rows, cols, static_cast<int>(m.cols()));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (int ch = 0; ch < x.channels(); ++ch) x(r, c, ch) = m(r * cols + c, ch);
    }
  }
  return x;
}

std::vector<ImageD> apply_forward(const ForwardOperator& op, const ImageD& x) {
  const PlaneChart& chart = op.chart();
  NLOS_REQUIRE(x.rows() == chart.rows && x.cols() == chart.cols && x.channels() >= 1,
               "chart image shape does not match the operator");
  const Eigen::MatrixXd xm = chart_to_matrix(x);
  const WallGeometry& wall = op.wall();
  std::vector<ImageD> out;
  out.reserve(op.measurements());
  for (std::size_t i = 0; i < op.measurements(); ++i) {
    const Eigen::MatrixXd y = op.forward_block(i, xm);
    ImageD img(wall.rows, wall.cols, x.channels());
    const std::vector<int>& rows = op.rows(i);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (int ch = 0; ch < x.channels(); ++ch) img.storage()[rows[k] * x.channels() + ch] = y(k, ch);
    }
    out.push_back(std::move(img));
  }
  return out;
}

ImageD apply_adjoint(const ForwardOperator& op, const std::vector<ImageD>& y) {
  NLOS_REQUIRE(y.size() == op.measurements(), "one wall image per measurement required");
  const WallGeometry& wall = op.wall();
  const int channels = y.front().channels();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(op.chart().texels(), channels);
  for (std::size_t i = 0; i < y.size(); ++i) {
    NLOS_REQUIRE(y[i].rows() == wall.rows && y[i].cols() == wall.cols && y[i].channels() == channels,
                 "wall image shape does not match the operator");
    const std::vector<int>& rows = op.rows(i);
    Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), channels);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (int ch = 0; ch < channels; ++ch) block(k, ch) = y[i].storage()[rows[k] * channels + ch];
    }
    acc += op.adjoint_block(i, block);
  }
  return matrix_to_chart(acc, op.chart().rows, op.chart().cols);
}

}  // namespace nlos
