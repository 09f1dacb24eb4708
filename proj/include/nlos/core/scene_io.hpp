#pragma once

#include <filesystem>
#include <json.hpp>

#include "nlos/core/scene.hpp"

namespace nlos {

/// Parse a scene document. Relative texture paths resolve against `base_dir`.
/// Unknown keys raise ConfigError naming the key.
Scene scene_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Scene load_scene(const std::filesystem::path& file);

nlohmann::json wall_to_json(const WallGeometry& wall);
WallGeometry wall_from_json(const nlohmann::json& j);
nlohmann::json plane_to_json(const PlaneParams& p);
PlaneParams plane_from_json(const nlohmann::json& j);
nlohmann::json noise_to_json(const NoiseParams& p);
NoiseParams noise_from_json(const nlohmann::json& j);
nlohmann::json source_to_json(const VirtualSource& s);
VirtualSource source_from_json(const nlohmann::json& j);

}  // namespace nlos
