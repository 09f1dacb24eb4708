#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlos/core/noise.hpp"
#include "nlos/dataset/sampler.hpp"
#include "nlos/inverse/pipeline.hpp"
#include "nlos/render/stack_render.hpp"

namespace nlos {

struct SimulateSettings {
  RendererKind renderer = RendererKind::fast;
  int samples = 10000;
  int grid_rows = 5;
  int grid_cols = 5;
  double grid_fraction = 0.8;
  bool grid_from_scene = true;  ///< use the scene's sources when it lists any and no grid was given
  std::uint64_t seed = 0;
  bool noise = true;
  double auto_exposure = 1.0;
  bool png = false;
};

struct ValidateSettings {
  std::vector<int> samples{25, 100, 10000};
  bool oracle_reference_check = false;  ///< also render the oracle twice and report their difference
  double threshold = 0.02;
  int source = -1;  ///< index into the scene sources, -1 = wall center
};

struct DatasetSettings {
  std::string mnist;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  int samples = 10000;
  int wall_resolution = 64;
  int threads = 1;
  double tilt_deg = 30.0;
  double rotation_deg = 180.0;
  double shift_m = 0.2;
  Range exponent{0.0, 512.0};
  Range specular_scale{0.0, 1.0};
};

/// One document for every command; flags override fields after loading.
struct RunConfig {
  std::filesystem::path workdir = ".";
  SimulateSettings simulate;
  RenderSettings render;
  std::optional<NoiseParams> noise;  ///< overrides the scene's noise when set
  InversionConfig inversion;
  ValidateSettings validate;
  DatasetSettings dataset;

  /// Relative paths resolve against workdir.
  std::filesystem::path resolve(const std::filesystem::path& p) const;
  void check() const;
};

/// Throws ConfigError naming the key for unknown keys or wrongly typed values.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
/// Throws IoError for a missing file.
RunConfig load_config(const std::filesystem::path& file);

/// "RxC" -> (R, C). Throws ConfigError otherwise.
std::pair<int, int> parse_grid(const std::string& text);
RendererKind parse_renderer(const std::string& text);

}  // namespace nlos
