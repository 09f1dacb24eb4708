#pragma once

#include <string>
#include <vector>

#include "nlos/core/math.hpp"

namespace nlos {

/// Directions over the hemisphere z > 0 with quadrature weights summing to 2 pi.
struct HemisphereSampling {
  std::string scheme = "fibonacci";
  std::vector<Vec3> directions;
  std::vector<double> weights;

  int count() const { return static_cast<int>(directions.size()); }

  /// Stratified spherical-Fibonacci set: equal-area bands in z, golden-ratio azimuths.
  /// Throws ContractViolation for count < 1.
  static HemisphereSampling fibonacci(int count);
  /// Regular n x n grid in (z, azimuth) cells, cell centers.
  static HemisphereSampling grid(int n);
};

}  // namespace nlos
