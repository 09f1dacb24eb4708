#include "nlos/render/nlss.hpp"

#include <cstdio>
#include <fstream>

#include "nlos/core/error.hpp"
#include "nlos/core/image_io.hpp"
#include "nlos/core/scene_io.hpp"

namespace nlos {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string map_name(std::size_t k, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "map_%04zu.%s", k, ext);
  return buf;
}

const json& field(const json& j, const char* key, const fs::path& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where.string() + ": manifest is missing '" + key + "'");
  return j.at(key);
}

}  // namespace

void write_nlss(const fs::path& dir, const ReflectionStack& stack, const NlssWriteOptions& options) {
  stack.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  json files = json::array();
  json sources = json::array();
  for (std::size_t k = 0; k < stack.size(); ++k) {
    const std::string name = map_name(k, "f32");
    write_f32(dir / name, stack.entries[k].image);
    files.push_back(name);
    sources.push_back(source_to_json(stack.entries[k].source));
  }

  json manifest = {
      {"format", "nlss"},
      {"version", 1},
      {"wall", wall_to_json(stack.wall)},
      {"sources", sources},
      {"direct_bounce_included", stack.direct_bounce_included},
      {"noisy", stack.noisy},
      {"seed", stack.seed},
      {"exposure", stack.exposure},
      {"layout",
       {{"dtype", "float32"},
        {"byte_order", "little"},
        {"order", "row-major"},
        {"shape", {stack.wall.rows, stack.wall.cols, 3}},
        {"files", files}}},
  };
  if (stack.noise) manifest["noise"] = noise_to_json(*stack.noise);
  if (stack.ground_truth_plane) manifest["ground_truth_plane"] = plane_to_json(*stack.ground_truth_plane);

  if (options.png) {
    double scale = options.png_scale;
    if (scale <= 0.0) {
      double peak = 0.0;
      for (const auto& e : stack.entries) {
        for (double v : e.image.data()) peak = std::max(peak, v);
      }
      scale = peak > 0.0 ? 1.0 / peak : 1.0;
    }
    json pngs = json::array();
    for (std::size_t k = 0; k < stack.size(); ++k) {
      const std::string name = map_name(k, "png");
      write_png16(dir / name, stack.entries[k].image, scale);
      pngs.push_back(name);
    }
    manifest["png"] = {{"scale", scale}, {"files", pngs}};
  }
  if (!options.extra.is_null()) manifest["extra"] = options.extra;

  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("short write to " + (dir / "manifest.json").string());
}

json read_nlss_manifest(const fs::path& dir) {
  const fs::path file = dir / "manifest.json";
  if (!fs::is_directory(dir)) throw IoError("stack directory not found: " + dir.string());
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

ReflectionStack read_nlss(const fs::path& dir) {
  const json m = read_nlss_manifest(dir);
  const fs::path where = dir / "manifest.json";
  if (field(m, "format", where) != "nlss") throw FormatError(where.string() + ": format is not 'nlss'");
  if (field(m, "version", where) != 1) throw FormatError(where.string() + ": unsupported version");
  try {
    ReflectionStack stack;
    stack.wall = wall_from_json(field(m, "wall", where));
    stack.direct_bounce_included = field(m, "direct_bounce_included", where).get<bool>();
    stack.noisy = field(m, "noisy", where).get<bool>();
    stack.seed = field(m, "seed", where).get<std::uint64_t>();
    stack.exposure = m.value("exposure", 1.0);
    if (m.contains("noise")) stack.noise = noise_from_json(m.at("noise"));
    if (m.contains("ground_truth_plane")) stack.ground_truth_plane = plane_from_json(m.at("ground_truth_plane"));
    const json& layout = field(m, "layout", where);
    if (field(layout, "dtype", where) != "float32" || field(layout, "byte_order", where) != "little") {
      throw FormatError(where.string() + ": only little-endian float32 tensors are supported");
    }
    const auto shape = field(layout, "shape", where).get<std::vector<int>>();
    if (shape != std::vector<int>{stack.wall.rows, stack.wall.cols, 3}) {
      throw FormatError(where.string() + ": tensor shape does not match the wall resolution");
    }
    const json& files = field(layout, "files", where);
    const json& sources = field(m, "sources", where);
    if (files.size() != sources.size()) throw FormatError(where.string() + ": one file per source expected");
    for (std::size_t k = 0; k < files.size(); ++k) {
      stack.entries.push_back({source_from_json(sources[k]),
                               read_f32(dir / files[k].get<std::string>(), shape[0], shape[1], shape[2])});
    }
    stack.validate();
    return stack;
  } catch (const json::exception& e) {
    throw FormatError(where.string() + ": " + e.what());
  }
}

}  // namespace nlos
