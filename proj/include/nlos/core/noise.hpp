#pragma once

#include <cstdint>
#include <limits>

#include "nlos/core/image.hpp"

namespace nlos {

/// Poisson-Gaussian sensor parameters. `gain` folds exposure time, aperture
/// solid angle, pixel footprint and photon energy into one multiplier.
struct NoiseParams {
  double kappa = 1.0 / 0.03;
  double sigma = 0.05;
  double gain = 1.0;

  void validate() const;
  /// Variance of one measurement at clean intensity I: g*I/kappa + sigma^2.
  double variance(double intensity) const { return gain * intensity / kappa + sigma * sigma; }
};

/// Counter-based 64-bit generator: every draw is a pure function of
/// (seed, stream, counter), so per-pixel streams are independent of evaluation order.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }
  std::uint64_t draws() const { return counter_; }

  /// SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Derive an independent child seed (e.g. per stack map or per dataset example).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// b = Poisson(kappa*g*I)/kappa + N(0, sigma^2), independently per pixel and channel.
/// Throws ContractViolation on negative or non-finite input pixels.
ImageD apply_sensor_noise(const ImageD& image, const NoiseParams& params, std::uint64_t seed);

}  // namespace nlos
