#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "nlos/core/math.hpp"
#include "nlos/core/noise.hpp"
#include "nlos/core/plane.hpp"
#include "nlos/core/scene.hpp"

namespace nlos::test {

/// Square planar object centered on the foot of the perpendicular from the wall origin.
inline PlanarObject object_on(const PlaneParams& plane, double size) {
  PlanarObject o;
  o.plane = plane;
  o.width_m = o.height_m = size;
  const Vec3 n = plane.normal();
  const Vec3 v = plane.point();
  const Vec3 foot = n.dot(v) * n;
  const auto [ea, eb] = plane_chart_basis(n);
  o.center_offset = Vec2((foot - v).dot(ea), (foot - v).dot(eb));
  return o;
}

/// Glossy object whose specular albedo is a sum of colored Gaussian blobs on black.
inline PlanarObject blob_object(const PlaneParams& plane, double size, int texels, double exponent,
                                std::uint64_t seed = 7, int blobs = 14) {
  PlanarObject o = object_on(plane, size);
  o.material.diffuse = AlbedoMap::constant(Rgb::Zero());
  o.material.specular = AlbedoMap::zeros(texels, texels);
  o.material.exponent = exponent;
  CounterRng rng(seed, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Blob {
    double r, c, s, a;
    Rgb color;
  };
  std::vector<Blob> list;
  const double scale = texels / 64.0;
  for (int k = 0; k < blobs; ++k) {
    Blob b;
    b.r = u(rng) * texels;
    b.c = u(rng) * texels;
    b.s = (2.5 + 4.0 * u(rng)) * scale;
    b.a = 0.5 + 0.5 * u(rng);
    b.color = Rgb(0.5 + 0.5 * u(rng), 0.5 + 0.5 * u(rng), 0.5 + 0.5 * u(rng));
    list.push_back(b);
  }
  for (int r = 0; r < texels; ++r) {
    for (int c = 0; c < texels; ++c) {
      Rgb v = Rgb::Zero();
      for (const Blob& b : list) {
        const double d2 = ((r - b.r) * (r - b.r) + (c - b.c) * (c - b.c)) / (b.s * b.s);
        v += b.a * std::exp(-0.5 * d2) * b.color;
      }
      o.material.specular.at(r, c) = v.min(1.0);
    }
  }
  return o;
}

}  // namespace nlos::test
