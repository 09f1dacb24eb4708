#pragma once

#include <filesystem>
#include <json.hpp>

#include "nlos/core/stack.hpp"

namespace nlos {

/// ".nlss" stack container: a directory holding manifest.json and one raw
/// little-endian float32 tensor per map, row-major (rows, cols, 3).
struct NlssWriteOptions {
  bool png = false;        ///< also export map_XXXX.png previews
  double png_scale = 0.0;  ///< 0 = 1 / max over the stack
  nlohmann::json extra;    ///< merged into the manifest under "extra" when not null
};

void write_nlss(const std::filesystem::path& dir, const ReflectionStack& stack, const NlssWriteOptions& options = {});
/// Throws IoError for a missing directory and FormatError for malformed manifests or tensors.
ReflectionStack read_nlss(const std::filesystem::path& dir);
nlohmann::json read_nlss_manifest(const std::filesystem::path& dir);

}  // namespace nlos
