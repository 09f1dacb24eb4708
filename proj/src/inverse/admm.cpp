#include "nlos/inverse/admm.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <string>

#include "nlos/core/error.hpp"

namespace nlos {

namespace {

/// Forward differences with a zero last row/column: rows [0, T) horizontal, [T, 2T) vertical.
SparseMatrix difference_operator(int rows, int cols) {
  const int t = rows * cols;
  std::vector<Eigen::Triplet<double>> tr;
  tr.reserve(4 * static_cast<std::size_t>(t));
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
  return d;
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& v, double k) {
  return v.unaryExpr([k](double x) { return x > k ? x - k : (x < -k ? x + k : 0.0); });
}

}  // namespace

void AdmmConfig::validate() const {
  NLOS_REQUIRE(lambda >= 0 && std::isfinite(lambda), "ADMM lambda must be finite and non-negative");
  NLOS_REQUIRE(rho > 0 && std::isfinite(rho), "ADMM rho must be positive");
  NLOS_REQUIRE(max_iterations >= 1, "ADMM needs at least one iteration");
  NLOS_REQUIRE(abs_tolerance > 0 && rel_tolerance > 0, "ADMM tolerances must be positive");
  NLOS_REQUIRE(nonnegative, "the non-negativity constraint cannot be disabled");
  NLOS_REQUIRE(cg_tolerance > 0 && cg_max_iterations >= 1 && cg_failure > 0, "CG settings must be positive");
}

bool residuals_decreasing(const std::vector<double>& history, int block) {
  NLOS_REQUIRE(block >= 1, "block length must be positive");
  const std::size_t start = history.size() / 10;
  const std::size_t blocks = (history.size() - start) / static_cast<std::size_t>(block);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < blocks; ++b) {
    double mean = 0.0;
    for (int k = 0; k < block; ++k) mean += history[start + b * block + k];
    mean /= block;
    if (mean > previous * (1.0 + 1e-9)) return false;
    previous = mean;
  }
  return true;
}

AdmmResult solve_reflectance(const ReflectionStack& stack, const ForwardOperator& op, const NoiseParams& noise,
                             const AdmmConfig& cfg) {
  cfg.validate();
  noise.validate();
  NLOS_REQUIRE(stack.size() == op.measurements(), "stack size must equal the operator's measurement count");
  NLOS_REQUIRE(stack.wall.rows == op.wall().rows && stack.wall.cols == op.wall().cols,
               "stack wall resolution must match the operator");
  const int channels = stack.entries.front().image.channels();
  const int texels = op.chart().texels();
  const std::size_t n = op.measurements();

  // Measurements and weights restricted to the rows each A_i can reach.
  std::vector<Eigen::MatrixXd> b(n);
  std::vector<Eigen::MatrixXd> w(n);
  const double floor_var = std::max(noise.sigma * noise.sigma, 1e-8);
  for (std::size_t i = 0; i < n; ++i) {
    const ImageD& img = stack.entries[i].image;
    const Rgb& power = stack.entries[i].source.power;
    const double mean_power = power.mean();
    const std::vector<int>& rows = op.rows(i);
    b[i].resize(static_cast<Eigen::Index>(rows.size()), channels);
    w[i].resize(static_cast<Eigen::Index>(rows.size()), channels);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (int ch = 0; ch < channels; ++ch) {
        const double raw = img.storage()[rows[k] * channels + ch];
        NLOS_REQUIRE(std::isfinite(raw), "stack contains non-finite pixels");
        const double ratio = channels == 3 && power[ch] > 0 ? mean_power / power[ch] : 1.0;
        const double var = std::max(raw / noise.kappa + noise.sigma * noise.sigma, floor_var);
        b[i](k, ch) = raw * ratio;
        w[i](k, ch) = 1.0 / (var * ratio * ratio);
      }
    }
  }

  // Weights are rescaled to unit mean so that lambda and rho act on intensity units.
  double weight_sum = 0.0;
  double weight_count = 0.0;
  for (const Eigen::MatrixXd& wi : w) {
    weight_sum += wi.sum();
    weight_count += static_cast<double>(wi.size());
  }
  NLOS_REQUIRE(weight_count > 0, "the operator reaches no wall pixel");
  for (Eigen::MatrixXd& wi : w) wi /= weight_sum / weight_count;

  const SparseMatrix d = difference_operator(op.chart().rows, op.chart().cols);
  const SparseMatrix ata = op.normal_matrix();
  SparseMatrix m = ata;
  m += SparseMatrix(d.transpose() * d);
  for (int t = 0; t < texels; ++t) m.coeffRef(t, t) += 1.0;
  m.makeCompressed();
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
  cg.setTolerance(cfg.cg_tolerance);
  cg.setMaxIterations(cfg.cg_max_iterations);
  const Eigen::SparseMatrix<double> mc = m;
  cg.compute(mc);

  const double rho = cfg.rho;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(texels, channels);
  std::vector<Eigen::MatrixXd> z1(n), u1(n);
  for (std::size_t i = 0; i < n; ++i) {
    z1[i] = Eigen::MatrixXd::Zero(b[i].rows(), channels);
    u1[i] = z1[i];
  }
  Eigen::MatrixXd z2 = Eigen::MatrixXd::Zero(2 * texels, channels);
  Eigen::MatrixXd u2 = z2;
  Eigen::MatrixXd z3 = x;
  Eigen::MatrixXd u3 = x;

  AdmmResult result;
  const double sqrt_p = std::sqrt(static_cast<double>(channels) *
                                  (static_cast<double>(2 * texels + texels) + [&] {
                                    double s = 0;
                                    for (const auto& bi : b) s += static_cast<double>(bi.rows());
                                    return s;
                                  }()));
  const double sqrt_n = std::sqrt(static_cast<double>(texels) * channels);

  // A^T z1 and A^T u1 are carried across iterations; A^T A x comes from the normal matrix,
  // so each iteration needs one forward and one adjoint pass over the stack.
  Eigen::MatrixXd at_z1 = Eigen::MatrixXd::Zero(texels, channels);
  Eigen::MatrixXd at_u1 = at_z1;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const Eigen::MatrixXd rhs = d.transpose() * (z2 - u2) + (z3 - u3) + at_z1 - at_u1;
    Eigen::MatrixXd next(texels, channels);
    for (int ch = 0; ch < channels; ++ch) {
      next.col(ch) = cg.solveWithGuess(rhs.col(ch), x.col(ch));
      const double norm = rhs.col(ch).norm();
      const double residual = norm > 0 ? (m * next.col(ch) - rhs.col(ch)).norm() / norm : 0.0;
      result.max_cg_residual = std::max(result.max_cg_residual, residual);
      result.cg_iterations += static_cast<int>(cg.iterations());
      if (residual > cfg.cg_failure) {
        throw SolverError("conjugate gradients stalled at relative residual " + std::to_string(residual) +
                          " in ADMM iteration " + std::to_string(it));
      }
    }
    x = std::move(next);
    if (!x.allFinite()) throw SolverError("non-finite ADMM iterate at iteration " + std::to_string(it));

    double primal_sq = 0.0;
    double ax_norm_sq = 0.0;
    double z_norm_sq = 0.0;
    double misfit = 0.0;
    Eigen::MatrixXd at_z1_next = Eigen::MatrixXd::Zero(texels, channels);
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::MatrixXd ax = op.forward_block(i, x);
      misfit += 0.5 * (w[i].array() * (ax - b[i]).array().square()).sum();
      const Eigen::MatrixXd v = ax + u1[i];
      z1[i] = ((w[i].array() * b[i].array() + rho * v.array()) / (w[i].array() + rho)).matrix();
      u1[i] = v - z1[i];
      primal_sq += (ax - z1[i]).squaredNorm();
      ax_norm_sq += ax.squaredNorm();
      z_norm_sq += z1[i].squaredNorm();
      at_z1_next += op.adjoint_block(i, z1[i]);
    }
    at_u1 += ata * x - at_z1_next;
    Eigen::MatrixXd dual_vec = at_z1_next - at_z1;
    at_z1 = std::move(at_z1_next);

    const Eigen::MatrixXd dx = d * x;
    const Eigen::MatrixXd z2_prev = z2;
    z2 = soft_threshold(dx + u2, cfg.lambda / rho);
    u2 += dx - z2;
    const Eigen::MatrixXd z3_prev = z3;
    z3 = (x + u3).cwiseMax(0.0);
    u3 += x - z3;

    primal_sq += (dx - z2).squaredNorm() + (x - z3).squaredNorm();
    ax_norm_sq += dx.squaredNorm() + x.squaredNorm();
    z_norm_sq += z2.squaredNorm() + z3.squaredNorm();
    dual_vec += d.transpose() * (z2 - z2_prev) + (z3 - z3_prev);
    const double dual_sq_norm = (rho * dual_vec).squaredNorm();
    const Eigen::MatrixXd cu = d.transpose() * u2 + u3 + at_u1;
    const double tv = dx.cwiseAbs().sum();

    const double primal = std::sqrt(primal_sq);
    const double dual = std::sqrt(dual_sq_norm);
    result.primal.push_back(primal);
    result.dual.push_back(dual);
    result.objective.push_back(misfit + cfg.lambda * tv);
    result.iterations = it + 1;

    const double eps_pri = sqrt_p * cfg.abs_tolerance + cfg.rel_tolerance * std::sqrt(std::max(ax_norm_sq, z_norm_sq));
    const double eps_dual = sqrt_n * cfg.abs_tolerance + cfg.rel_tolerance * rho * cu.norm();
    if (primal <= eps_pri && dual <= eps_dual) {
      result.converged = true;
      break;
    }
  }

  std::vector<double> combined(result.primal.size());
  for (std::size_t k = 0; k < combined.size(); ++k) combined[k] = result.primal[k] + result.dual[k];
  result.monotone = residuals_decreasing(combined);
  result.x = matrix_to_chart(z3, op.chart().rows, op.chart().cols);
  return result;
}

}  // namespace nlos
