#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "nlos/simd/kernels.hpp"

using namespace nlos::simd;

namespace {

struct Rows {
  std::vector<double> r, g, b;
  explicit Rows(int n) : r(n, 0.0), g(n, 0.0), b(n, 0.0) {}
};

double rel_diff(const Rows& a, const Rows& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < a.r.size(); ++k) {
    for (auto [x, y] : {std::pair{a.r[k], b.r[k]}, std::pair{a.g[k], b.g[k]}, std::pair{a.b[k], b.b[k]}}) {
      num = std::max(num, std::abs(x - y));
      den = std::max(den, std::abs(y));
    }
  }
  return den > 0 ? num / den : num;
}

void unit(double* v, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    v[k] = n(rng);
    s += v[k] * v[k];
  }
  s = std::sqrt(s);
  for (int k = 0; k < 3; ++k) v[k] /= s;
}

WallSpan random_span(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {{u(rng), u(rng), 0.0}, {0.013, 0.002 * u(rng), 0.0}, count};
}

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

}  // namespace

TEST_CASE("dispatch always offers the scalar table and rejects unsupported ISAs") {
  CHECK(isa_supported(Isa::scalar));
  CHECK(kernels(Isa::scalar).isa == Isa::scalar);
  CHECK(isa_supported(kernels().isa));
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!isa_supported(isa)) CHECK_THROWS_AS(kernels(isa), std::invalid_argument);
  }
  MESSAGE("active kernels: " << isa_name(kernels().isa));
}

TEST_CASE("vector oracle kernel matches the scalar reference") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<OraclePatch> patches(97);
  for (OraclePatch& p : patches) {
    p.x[0] = u(rng) - 0.5;
    p.x[1] = u(rng) - 0.5;
    p.x[2] = 0.3 + u(rng);
    unit(p.n, rng);
    p.n[2] = -std::abs(p.n[2]);
    unit(p.mirror, rng);
    for (int c = 0; c < 3; ++c) {
      p.kd[c] = u(rng);
      p.ks[c] = u(rng);
    }
    const double e = u(rng);
    p.exponent = e < 0.1 ? 0.0 : e * 500.0;
    p.specular = u(rng) < 0.8;
  }
  for (Isa isa : vector_isas()) {
    for (int count : {1, 3, 4, 7, 64, 257}) {
      const WallSpan span = random_span(rng, count);
      Rows ref(count), got(count);
      const long s0 = kernels(Isa::scalar).oracle_rows(patches.data(), patches.size(), span, 1e-14, ref.r.data(),
                                                      ref.g.data(), ref.b.data());
      const long s1 = kernels(isa).oracle_rows(patches.data(), patches.size(), span, 1e-14, got.r.data(),
                                               got.g.data(), got.b.data());
      CHECK(s0 == s1);
      CHECK(*std::max_element(ref.r.begin(), ref.r.end()) > 0.0);
      CHECK(rel_diff(got, ref) <= 1e-12);
    }
  }
}

TEST_CASE("vector fast-renderer kernel matches the scalar reference") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int lit = 0;  // comparisons with at least one shaded pixel
  const int tr = 5, tc = 7;
  std::vector<double> kd(4 * tr * tc), ks(4 * tr * tc);
  for (double& v : kd) v = u(rng);
  for (double& v : ks) v = u(rng);
  for (int trial = 0; trial < 60; ++trial) {
    FastPrimitive p{};
    p.n[0] = 0.2 * (u(rng) - 0.5);
    p.n[1] = 0.2 * (u(rng) - 0.5);
    p.n[2] = -1.0;
    const double nn = std::sqrt(p.n[0] * p.n[0] + p.n[1] * p.n[1] + 1.0);
    for (double& v : p.n) v /= nn;
    const double origin[3] = {-0.6, -0.6, 0.6};
    p.d = p.n[0] * origin[0] + p.n[1] * origin[1] + p.n[2] * origin[2];
    for (int k = 0; k < 3; ++k) p.origin[k] = origin[k];
    p.da[0] = 1.0 / 1.2;
    p.db[1] = 1.0 / 1.2;
    p.triangle = trial % 3 == 0;
    p.tex_rows = tr;
    p.tex_cols = tc;
    p.kd = kd.data();
    p.ks = ks.data();
    p.exponent = trial % 4 == 0 ? 0.0 : 1.0 + 400.0 * u(rng);
    p.specular = trial % 5 != 0;
    p.smooth = trial % 2;
    for (int k = 0; k < 3; ++k) {
      p.n0[k] = p.n[k];
      p.dna[k] = 0.1 * (u(rng) - 0.5);
      p.dnb[k] = 0.1 * (u(rng) - 0.5);
    }
    FastDirection d{};
    unit(d.s, rng);
    d.s[2] = std::abs(d.s[2]) + 0.05;
    const double sn = std::sqrt(d.s[0] * d.s[0] + d.s[1] * d.s[1] + d.s[2] * d.s[2]);
    for (double& v : d.s) v /= sn;
    d.inv_ns = 1.0 / (p.n[0] * d.s[0] + p.n[1] * d.s[1] + p.n[2] * d.s[2]);
    d.weight = 0.01 * u(rng);
    const FastLight light{{u(rng) - 0.5, u(rng) - 0.5, 0.0}, {1.0, 0.5, 2.0}};
    const int count = 1 + trial * 5;
    const WallSpan span = random_span(rng, count);
    std::vector<int> owner(count);
    for (int& o : owner) o = u(rng) < 0.7 ? 3 : 4;
    for (Isa isa : vector_isas()) {
      for (const int* own : {static_cast<const int*>(nullptr), static_cast<const int*>(owner.data())}) {
        Rows ref(count), got(count);
        kernels(Isa::scalar).fast_row(p, d, light, span, own, 3, ref.r.data(), ref.g.data(), ref.b.data());
        kernels(isa).fast_row(p, d, light, span, own, 3, got.r.data(), got.g.data(), got.b.data());
        CHECK(rel_diff(got, ref) <= 1e-12);
        lit += *std::max_element(ref.r.begin(), ref.r.end()) > 0.0 ? 1 : 0;
      }
    }
  }
  if (!vector_isas().empty()) CHECK(lit >= 20);
}
