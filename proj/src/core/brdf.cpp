#include "nlos/core/brdf.hpp"

#include <cmath>

#include "nlos/core/error.hpp"

namespace nlos {

double phong_lobe(double cos_mirror, double exponent) {
  if (cos_mirror <= 0.0) return exponent == 0.0 ? (exponent + 2.0) / (2.0 * kPi) : 0.0;
  return (exponent + 2.0) / (2.0 * kPi) * std::pow(cos_mirror, exponent);
}

Rgb phong_brdf(const Vec3& wi, const Vec3& wo, const Vec3& n, const PhongSample& m) {
  constexpr double tol = 1e-6;
  NLOS_REQUIRE(is_unit(wi, tol) && is_unit(wo, tol) && is_unit(n, tol), "phong_brdf: directions must be unit length");
  const double cos_i = wi.dot(n);
  NLOS_REQUIRE(cos_i > 0.0 && wo.dot(n) > 0.0, "phong_brdf: both directions must lie above the surface");
  const Vec3 mirror = 2.0 * cos_i * n - wi;
  const double lobe = phong_lobe(mirror.dot(wo), m.exponent);
  return m.alpha_d * kInvPi + m.alpha_s * lobe;
}

}  // namespace nlos
