#include "nlos/core/stack.hpp"

#include <cmath>

#include "nlos/core/error.hpp"

namespace nlos {

void ReflectionStack::validate() const {
  wall.validate();
  NLOS_REQUIRE(!entries.empty(), "reflection stack needs at least one map");
  for (const auto& e : entries) {
    e.source.validate(wall);
    NLOS_REQUIRE(e.image.rows() == wall.rows && e.image.cols() == wall.cols && e.image.channels() == 3,
                 "every stack map must be rows x cols x 3 of the wall");
    for (double v : e.image.data()) {
      NLOS_REQUIRE(std::isfinite(v), "stack maps must be finite");
      NLOS_REQUIRE(noisy || v >= 0.0, "noise-free stack maps must be non-negative");
    }
  }
  if (noise) noise->validate();
}

}  // namespace nlos
