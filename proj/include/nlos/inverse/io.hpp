#pragma once

#include <filesystem>

#include <json.hpp>

#include "nlos/core/image.hpp"
#include "nlos/inverse/estimate_plane.hpp"

namespace nlos {

/// {theta, phi, nu, origin, objective, iterations, normal, spreads}
nlohmann::json plane_estimate_to_json(const PlaneEstimate& estimate);
PlaneEstimate plane_estimate_from_json(const nlohmann::json& j);

/// Writes <stem>.png (16-bit, value * scale) and <stem>.f32 (raw float32, rows x cols x channels).
/// scale = 0 normalizes by the image maximum.
void write_chart(const std::filesystem::path& stem, const ImageD& chart, double scale = 1.0);

}  // namespace nlos
