#include "nlos/render/sampling.hpp"

#include <cmath>
#include <numbers>

#include "nlos/core/error.hpp"

namespace nlos {

namespace {

Vec3 direction(double z, double phi) {
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

HemisphereSampling HemisphereSampling::fibonacci(int count) {
  NLOS_REQUIRE(count >= 1, "hemisphere sampling needs at least one direction");
  HemisphereSampling s;
  s.scheme = "fibonacci";
  s.directions.reserve(static_cast<std::size_t>(count));
  const double inv_golden = 1.0 / std::numbers::phi;
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - (k + 0.5) / count;
    double turns = k * inv_golden;
    turns -= std::floor(turns);
    s.directions.push_back(direction(z, 2.0 * kPi * turns));
  }
  s.weights.assign(static_cast<std::size_t>(count), 2.0 * kPi / count);
  return s;
}

HemisphereSampling HemisphereSampling::grid(int n) {
  NLOS_REQUIRE(n >= 1, "hemisphere grid needs at least one cell per side");
  HemisphereSampling s;
  s.scheme = "grid";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s.directions.push_back(direction(1.0 - (i + 0.5) / n, 2.0 * kPi * (j + 0.5) / n));
    }
  }
  s.weights.assign(s.directions.size(), 2.0 * kPi / (static_cast<double>(n) * n));
  return s;
}

}  // namespace nlos
