#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlos/core/noise.hpp"
#include "nlos/dataset/sampler.hpp"
#include "nlos/render/render.hpp"

namespace nlos {

struct DatasetOptions {
  int samples = 10000;
  bool noise = true;
  NoiseParams noise_params;
  double auto_exposure = 1.0;  ///< see StackOptions::auto_exposure
  RenderSettings settings;
  int threads = 1;  ///< examples rendered concurrently; 0 = hardware concurrency
  /// Called once per example with (index, skipped because already complete, seconds).
  std::function<void(std::size_t, bool, double)> on_example;
};

struct DatasetExample {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string directory;  ///< relative to the dataset root
  std::vector<std::string> files;  ///< relative to the example directory
  PlaneParams plane;
  SampledPose pose;
};

struct DatasetManifest {
  std::size_t count = 0;
  std::vector<DatasetExample> examples;
  nlohmann::json settings;  ///< sampler, wall, render and noise settings
};

/// Render `count` examples under `out`. Each example directory holds stack.nlss,
/// albedo/depth labels (.f32 + 16-bit .png) and example.json, written last. Complete
/// examples are skipped, so an interrupted run resumes; manifest.json is written last.
/// Throws IoError listing the completed examples when writing fails.
DatasetManifest generate_dataset(const SceneSampler& sampler, std::size_t count, const std::filesystem::path& out,
                                 const DatasetOptions& options = {});

nlohmann::json manifest_to_json(const DatasetManifest& manifest);
/// Throws IoError for a missing file and FormatError for a malformed manifest.
DatasetManifest read_manifest(const std::filesystem::path& dir);

}  // namespace nlos
