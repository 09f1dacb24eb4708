#pragma once

#include "nlos/core/material.hpp"

namespace nlos {

/// Energy-normalized Phong BRDF:
///   alpha_d / pi + alpha_s * (e + 2) / (2 pi) * max(0, r . wo)^e,  r = 2 (wi . n) n - wi.
/// `wi` points from the surface toward the source, `wo` toward the receiver.
/// Throws ContractViolation for non-unit directions (1e-6) or either direction
/// below the surface.
Rgb phong_brdf(const Vec3& wi, const Vec3& wo, const Vec3& n, const PhongSample& m);

/// Specular lobe value (e + 2) / (2 pi) * max(0, cos)^e without contract checks.
double phong_lobe(double cos_mirror, double exponent);

}  // namespace nlos
