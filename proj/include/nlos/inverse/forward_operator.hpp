#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "nlos/core/image.hpp"
#include "nlos/inverse/homography.hpp"

namespace nlos {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Per-texel anisotropic Gaussian blur, in chart meters: std `major` along the chart
/// direction (cos angle, sin angle), `minor` across it.
struct TexelBlur {
  double major = 0.0;
  double minor = 0.0;
  double angle = 0.0;
};

struct OperatorConfig {
  double beta = 0.0;         ///< angular std of the specular lobe, radians
  double gain = 1.0;         ///< exposure times sensor gain of the measurements
  bool flat_field = true;    ///< include the analytic lobe gain; false gives a pure blur + warp
  bool anisotropic = true;   ///< stretch the blur by 1 / cos of the reflection angle
  double support = 3.0;      ///< kernel radius in standard deviations
};

/// Linear map from a chart reflectance image to N wall images:
///   y_i = G_i . W_i K_i x
/// K_i blurs the chart with per-texel Gaussians (scatter form, each texel's mass is kept),
/// W_i pulls the blurred chart back onto the wall pixels through H_i^-1 with bilinear
/// weights, and G_i is a per-pixel gain. Wall pixels that cannot see the plane are zero.
class ForwardOperator {
 public:
  ForwardOperator() = default;

  /// General form. `blur[i]` holds one TexelBlur per texel (row-major), `gain[i]` one value
  /// per wall pixel (empty vector = 1), `valid[i]` one flag per wall pixel (empty = all).
  ForwardOperator(const WallGeometry& wall, const PlaneChart& chart, std::vector<Mat3> homographies,
                  const std::vector<std::vector<TexelBlur>>& blur, const std::vector<std::vector<double>>& gain,
                  const std::vector<std::vector<char>>& valid, double support = 3.0);

  /// Geometry-derived operator for a plane and its sources.
  static ForwardOperator from_plane(const WallGeometry& wall, const PlaneChart& chart,
                                    const std::vector<VirtualSource>& sources, const OperatorConfig& config);

  std::size_t measurements() const { return warp_.size(); }
  const WallGeometry& wall() const { return wall_; }
  const PlaneChart& chart() const { return chart_; }
  const std::vector<Mat3>& homographies() const { return homographies_; }
  const std::vector<std::vector<TexelBlur>>& blur() const { return blur_; }

  const SparseMatrix& blur_matrix(std::size_t i) const { return blur_mat_[i]; }
  /// Gain-weighted warp restricted to the pixels listed by rows(i).
  const SparseMatrix& warp_matrix(std::size_t i) const { return warp_[i]; }
  /// Flat wall-pixel index of every row of warp_matrix(i).
  const std::vector<int>& rows(std::size_t i) const { return rows_[i]; }

  /// Matrix forms on (texels x channels) / (rows(i) x channels) blocks.
  Eigen::MatrixXd forward_block(std::size_t i, const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd adjoint_block(std::size_t i, const Eigen::MatrixXd& y) const;
  /// Sum_i A_i^T A_i.
  SparseMatrix normal_matrix() const;

 private:
  WallGeometry wall_;
  PlaneChart chart_;
  std::vector<Mat3> homographies_;
  std::vector<std::vector<TexelBlur>> blur_;
  std::vector<SparseMatrix> blur_mat_;
  std::vector<SparseMatrix> warp_;
  std::vector<SparseMatrix> blur_t_;  ///< explicit transposes, so both directions gather
  std::vector<SparseMatrix> warp_t_;
  std::vector<std::vector<int>> rows_;
};

/// x: chart rows x cols x C. Returns N wall images rows x cols x C.
/// Throws ContractViolation on a shape mismatch.
std::vector<ImageD> apply_forward(const ForwardOperator& op, const ImageD& x);
/// Exact transpose of apply_forward.
ImageD apply_adjoint(const ForwardOperator& op, const std::vector<ImageD>& y);

/// Chart image <-> (texels x channels) matrix.
Eigen::MatrixXd chart_to_matrix(const ImageD& x);
ImageD matrix_to_chart(const Eigen::MatrixXd& m, int rows, int cols);

}  // namespace nlos
