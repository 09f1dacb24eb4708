#include "nlos/core/noise.hpp"

#include <cmath>
#include <random>

#include "nlos/core/error.hpp"

namespace nlos {

void NoiseParams::validate() const {
  NLOS_REQUIRE(kappa > 0.0 && std::isfinite(kappa), "noise kappa must be > 0");
  NLOS_REQUIRE(sigma >= 0.0 && std::isfinite(sigma), "noise sigma must be >= 0");
  NLOS_REQUIRE(gain >= 0.0 && std::isfinite(gain), "noise gain must be >= 0");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return CounterRng::mix(CounterRng::mix(seed) + 0xD1B54A32D192ED03ULL * (index + 1));
}

ImageD apply_sensor_noise(const ImageD& image, const NoiseParams& params, std::uint64_t seed) {
  params.validate();
  ImageD out(image.rows(), image.cols(), image.channels());
  const auto in = image.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < in.size(); ++k) {
    const double intensity = in[k];
    if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
      throw ContractViolation("apply_sensor_noise: pixel " + std::to_string(k) + " is negative or non-finite");
    }
    // One stream per pixel/channel; draw counters advance inside the stream only.
    CounterRng rng(seed, k);
    const double mean_photons = params.kappa * params.gain * intensity;
    double value = 0.0;
    if (mean_photons > 0.0) {
      std::poisson_distribution<long long> shot(mean_photons);
      value = static_cast<double>(shot(rng)) / params.kappa;
    }
    if (params.sigma > 0.0) {
      std::normal_distribution<double> read(0.0, params.sigma);
      value += read(rng);
    }
    dst[k] = value;
  }
  return out;
}

}  // namespace nlos
