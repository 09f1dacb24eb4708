#include "nlos/inverse/io.hpp"

#include <algorithm>

#include "nlos/core/error.hpp"
#include "nlos/core/image_io.hpp"
#include "nlos/core/scene_io.hpp"

namespace nlos {

nlohmann::json plane_estimate_to_json(const PlaneEstimate& e) {
  const Vec3 n = e.params.normal();
  return {{"theta", e.params.theta},
          {"phi", e.params.phi},
          {"nu", e.params.nu},
          {"origin", {e.params.origin.x(), e.params.origin.y(), e.params.origin.z()}},
          {"normal", {n.x(), n.y(), n.z()}},
          {"objective", e.objective},
          {"iterations", e.iterations},
          {"spreads", e.spreads}};
}

PlaneEstimate plane_estimate_from_json(const nlohmann::json& j) {
  try {
    PlaneEstimate e;
    e.params.theta = j.at("theta").get<double>();
    e.params.phi = j.at("phi").get<double>();
    e.params.nu = j.at("nu").get<double>();
    const auto o = j.at("origin").get<std::vector<double>>();
    if (o.size() != 3) throw FormatError("plane estimate: origin needs 3 components");
    e.params.origin = Vec3(o[0], o[1], o[2]);
    e.objective = j.at("objective").get<double>();
    e.iterations = j.at("iterations").get<int>();
    if (j.contains("spreads")) e.spreads = j.at("spreads").get<std::vector<double>>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("plane estimate: ") + ex.what());
  }
}

void write_chart(const std::filesystem::path& stem, const ImageD& chart, double scale) {
  NLOS_REQUIRE(scale >= 0, "chart scale must be non-negative");
  if (scale == 0.0) {
    double peak = 0.0;
    for (double v : chart.storage()) peak = std::max(peak, v);
    scale = peak > 0 ? 1.0 / peak : 1.0;
  }
  std::filesystem::path png = stem;
  png += ".png";
  std::filesystem::path raw = stem;
  raw += ".f32";
  write_png16(png, chart, scale);
  write_f32(raw, chart);
}

}  // namespace nlos
