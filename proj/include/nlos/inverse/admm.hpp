#pragma once

#include <vector>

#include "nlos/core/image.hpp"
#include "nlos/core/noise.hpp"
#include "nlos/core/stack.hpp"
#include "nlos/inverse/forward_operator.hpp"

namespace nlos {

struct AdmmConfig {
  double lambda = 0.01;  ///< TV weight
  double rho = 1.0;
  int max_iterations = 200;
  double abs_tolerance = 1e-5;
  double rel_tolerance = 1e-5;
  bool nonnegative = true;  ///< the constraint is part of the problem; false is rejected
  double cg_tolerance = 1e-8;
  int cg_max_iterations = 1000;
  /// Relative CG residual above which the x-update is reported as failed.
  double cg_failure = 1e-3;

  void validate() const;
};

struct AdmmResult {
  ImageD x;  ///< chart rows x cols x channels, >= 0
  int iterations = 0;
  bool converged = false;
  std::vector<double> primal;     ///< primal residual norm per iteration
  std::vector<double> dual;       ///< dual residual norm per iteration
  std::vector<double> objective;  ///< weighted data misfit + lambda TV at the x iterate
  double max_cg_residual = 0.0;
  int cg_iterations = 0;
  bool monotone = false;  ///< residuals_decreasing(primal + dual)
};

/// Solve min_x sum_i 1/2 ||b_i - A_i x||^2_W + lambda ||D x||_1  s.t. x >= 0 by ADMM with
/// the splitting z1 = A x, z2 = D x, z3 = x. W is the Poisson-Gaussian weight
/// 1 / max(b/kappa + sigma^2, sigma^2), rescaled to unit mean over the stack. Per-channel source powers are divided out of
/// the measurements, so the operator is built with the mean power of each source.
/// Throws ContractViolation when the stack and operator disagree, SolverError when CG
/// stalls above cfg.cg_failure or an iterate becomes non-finite.
AdmmResult solve_reflectance(const ReflectionStack& stack, const ForwardOperator& op, const NoiseParams& noise,
                             const AdmmConfig& cfg = {});

/// Block-averaged monotonicity over the last 90% of a residual history: the history is
/// cut into blocks of `block` iterations and each block mean must not exceed the previous one.
bool residuals_decreasing(const std::vector<double>& history, int block = 10);

}  // namespace nlos
