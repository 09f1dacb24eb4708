#include "nlos/dataset/generate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "nlos/core/error.hpp"
#include "nlos/core/image_io.hpp"
#include "nlos/core/scene_io.hpp"
#include "nlos/render/nlss.hpp"
#include "nlos/render/orthogonal_view.hpp"
#include "nlos/render/stack_render.hpp"

namespace nlos {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::vector<std::string> kExampleFiles = {"stack.nlss", "albedo.f32", "albedo.png", "depth.f32", "depth.png"};

std::string example_directory(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "example_%06zu", index);
  return name;
}

/// Write through a temporary file and rename, so readers never see a partial document.
void write_json_atomic(const fs::path& file, const json& doc) {
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

json read_json(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

json example_to_json(const DatasetExample& e) {
  return {{"index", e.index},     {"seed", e.seed},   {"directory", e.directory},
          {"files", e.files},     {"plane", plane_to_json(e.plane)}, {"pose", pose_to_json(e.pose)}};
}

SampledPose pose_from_json(const json& j) {
  SampledPose p;
  p.digit = j.at("digit").get<std::size_t>();
  p.rotation = j.at("rotation").get<double>();
  const auto s = j.at("shift").get<std::vector<double>>();
  if (s.size() != 3) throw FormatError("pose shift must have 3 components");
  p.shift = Vec3(s[0], s[1], s[2]);
  p.theta = j.at("theta").get<double>();
  p.phi = j.at("phi").get<double>();
  p.exponent = j.at("exponent").get<double>();
  p.specular_scale = j.at("specular_scale").get<double>();
  return p;
}

DatasetExample example_from_json(const json& j) {
  DatasetExample e;
  e.index = j.at("index").get<std::size_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.directory = j.at("directory").get<std::string>();
  e.files = j.at("files").get<std::vector<std::string>>();
  e.plane = plane_from_json(j.at("plane"));
  e.pose = pose_from_json(j.at("pose"));
  return e;
}

/// A finished example has its record and every listed file, and matches the expected seed.
bool example_complete(const fs::path& dir, std::uint64_t seed, DatasetExample& out) {
  const fs::path record = dir / "example.json";
  if (!fs::exists(record)) return false;
  try {
    DatasetExample e = example_from_json(read_json(record));
    if (e.seed != seed || e.files != kExampleFiles) return false;
    for (const std::string& f : e.files) {
      if (!fs::exists(dir / f)) return false;
    }
    out = std::move(e);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

DatasetExample render_example(const SceneSampler& sampler, std::size_t index, const fs::path& root,
                              const DatasetOptions& options) {
  DatasetExample e;
  e.index = index;
  e.seed = derive_seed(sampler.seed, index);
  e.directory = example_directory(index);
  e.files = kExampleFiles;
  const Scene scene = sample_scene(sampler, index, &e.pose);
  e.plane = std::get<PlanarObject>(scene.hidden).plane;

  StackOptions so;
  so.renderer = RendererKind::fast;
  so.samples = options.samples;
  so.settings = options.settings;
  so.settings.threads = 1;
  if (options.noise) so.noise = options.noise_params;
  so.auto_exposure = options.auto_exposure;
  so.seed = derive_seed(e.seed, 1);
  const ReflectionStack stack = render_stack(scene, scene.sources, so);
  const OrthogonalView view = render_orthogonal_view(scene);
  const ImageD depth = depth_for_file(view.depth);
  double depth_peak = 0.0;
  for (double v : depth.data()) depth_peak = std::max(depth_peak, v);

  const fs::path dir = root / e.directory;
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_nlss(dir / "stack.nlss", stack);
  write_f32(dir / "albedo.f32", view.albedo);
  write_png16(dir / "albedo.png", view.albedo, 1.0);
  write_f32(dir / "depth.f32", depth);
  write_png16(dir / "depth.png", depth, depth_peak > 0.0 ? 1.0 / depth_peak : 1.0);
  write_json_atomic(dir / "example.json", example_to_json(e));
  return e;
}

json render_settings_json(const DatasetOptions& o) {
  return {{"renderer", "fast"},
          {"samples", o.samples},
          {"include_direct_bounce", o.settings.include_direct_bounce},
          {"clamp_negative", o.settings.clamp_negative},
          {"epsilon", o.settings.epsilon},
          {"grazing_clamp", o.settings.grazing_clamp},
          {"auto_exposure", o.auto_exposure}};
}

}  // namespace

DatasetManifest generate_dataset(const SceneSampler& sampler, std::size_t count, const fs::path& out,
                                 const DatasetOptions& options) {
  sampler.validate();
  options.settings.validate();
  NLOS_REQUIRE(options.samples >= 1, "dataset: samples must be positive");
  NLOS_REQUIRE(options.threads >= 0, "dataset: threads must be >= 0");
  if (options.noise) options.noise_params.validate();
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create dataset directory " + out.string() + ": " + ec.message());

  DatasetManifest manifest;
  manifest.count = count;
  manifest.examples.resize(count);
  manifest.settings = {{"sampler", sampler_to_json(sampler)},
                       {"render", render_settings_json(options)},
                       {"noise", options.noise ? noise_to_json(options.noise_params) : json(nullptr)},
                       {"example_files", kExampleFiles}};

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  std::size_t failed_index = 0;
  const auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      const auto t0 = std::chrono::steady_clock::now();
      try {
        DatasetExample e;
        const bool skipped = example_complete(out / example_directory(k), derive_seed(sampler.seed, k), e);
        if (!skipped) e = render_example(sampler, k, out, options);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::lock_guard<std::mutex> lock(mu);
        manifest.examples[k] = std::move(e);
        if (options.on_example) options.on_example(k, skipped, seconds);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure || k < failed_index) {
          failure = std::current_exception();
          failed_index = k;
        }
        return;
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads =
      std::min<std::size_t>(count == 0 ? 1 : count, options.threads == 0 ? hw : static_cast<std::size_t>(options.threads));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  if (failure) {
    std::size_t complete = 0;
    DatasetExample probe;
    for (std::size_t k = 0; k < count; ++k) {
      complete += example_complete(out / example_directory(k), derive_seed(sampler.seed, k), probe) ? 1 : 0;
    }
    std::string reason;
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      reason = e.what();
    }
    const std::string report = "dataset generation stopped at example " + std::to_string(failed_index) + " (" +
                               reason + "); " + std::to_string(complete) + " of " + std::to_string(count) +
                               " examples are complete in " + out.string() + " and a rerun resumes from there";
    try {
      std::rethrow_exception(failure);
    } catch (const IoError&) {
      throw IoError(report);
    } catch (const RenderError&) {
      throw RenderError(report);
    }
  }

  std::set<std::uint64_t> seeds;
  for (const DatasetExample& e : manifest.examples) {
    if (!seeds.insert(e.seed).second) throw ContractViolation("dataset: duplicate example seed");
  }
  write_json_atomic(out / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

json manifest_to_json(const DatasetManifest& m) {
  json examples = json::array();
  for (const DatasetExample& e : m.examples) examples.push_back(example_to_json(e));
  return {{"format", "nlos-dataset"}, {"version", 1}, {"count", m.count}, {"settings", m.settings},
          {"examples", examples}};
}

DatasetManifest read_manifest(const fs::path& dir) {
  const json j = read_json(dir / "manifest.json");
  try {
    if (j.at("format").get<std::string>() != "nlos-dataset") throw FormatError("manifest format is not nlos-dataset");
    DatasetManifest m;
    m.count = j.at("count").get<std::size_t>();
    m.settings = j.at("settings");
    for (const json& e : j.at("examples")) m.examples.push_back(example_from_json(e));
    if (m.examples.size() != m.count) throw FormatError("manifest lists a different number of examples than count");
    return m;
  } catch (const json::exception& e) {
    throw FormatError((dir / "manifest.json").string() + ": " + e.what());
  }
}

}  // namespace nlos
