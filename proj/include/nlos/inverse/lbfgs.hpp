#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

namespace nlos {

struct LbfgsConfig {
  int memory = 10;
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;  ///< stop when ||g|| <= tol * max(1, f)
  double c1 = 1e-4;                  ///< sufficient decrease
  double c2 = 0.9;                   ///< curvature
  int max_line_search = 40;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool line_search_failed = false;
  std::string message;
};

/// f(x, grad) returns the value and writes the gradient.
using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with a strong-Wolfe line search.
LbfgsResult lbfgs_minimize(const ObjectiveFn& f, const Eigen::VectorXd& x0, const LbfgsConfig& config = {});

}  // namespace nlos
