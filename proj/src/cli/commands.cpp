#include "nlos/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "nlos/core/error.hpp"
#include "nlos/core/scene_io.hpp"
#include "nlos/dataset/generate.hpp"
#include "nlos/dataset/idx.hpp"
#include "nlos/inverse/io.hpp"
#include "nlos/render/nlss.hpp"

namespace nlos {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

void write_json_file(const fs::path& file, const json& doc) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

json read_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

NoiseParams pick_noise(const RunConfig& c, const std::optional<NoiseParams>& fallback) {
  if (c.noise) return *c.noise;
  if (fallback) return *fallback;
  return NoiseParams{};
}

ReflectionStack load_stack(const RunConfig& c, const fs::path& in) {
  const fs::path dir = c.resolve(in);
  if (!fs::exists(dir)) throw IoError("stack not found: " + dir.string());
  return read_nlss(dir);
}

double degrees(double rad) { return rad * 180.0 / kPi; }

fs::path chart_stem(const fs::path& out) {
  const std::string ext = out.extension().string();
  if (ext == ".png" || ext == ".f32" || ext == ".json") return fs::path(out).replace_extension();
  return out;
}

}  // namespace

int cmd_simulate(const RunConfig& c, const SimulateArgs& args, std::ostream& out) {
  const Scene scene = load_scene(c.resolve(args.scene));
  const SimulateSettings& sim = c.simulate;
  const std::vector<VirtualSource> grid = sim.grid_from_scene && !scene.sources.empty()
                                              ? scene.sources
                                              : source_grid(scene.wall, sim.grid_rows, sim.grid_cols, sim.grid_fraction);
  StackOptions so;
  so.renderer = sim.renderer;
  so.samples = sim.samples;
  so.settings = c.render;
  if (sim.noise) so.noise = pick_noise(c, scene.noise);
  so.auto_exposure = sim.auto_exposure;
  so.seed = sim.seed;
  so.on_map = [&](std::size_t k, double seconds) {
    out << "map " << (k + 1) << "/" << grid.size() << "  " << std::fixed << std::setprecision(3) << seconds << " s\n"
        << std::flush;
  };
  const auto t0 = Clock::now();
  const ReflectionStack stack = render_stack(scene, grid, so);
  const double render_seconds = since(t0);
  NlssWriteOptions wo;
  wo.png = sim.png;
  write_nlss(c.resolve(args.out), stack, wo);
  out << "rendered " << stack.size() << " maps (" << (sim.renderer == RendererKind::fast ? "fast" : "oracle")
      << ") in " << std::fixed << std::setprecision(3) << render_seconds << " s, exposure " << std::setprecision(6)
      << stack.exposure << "\nwrote " << c.resolve(args.out).string() << "\n";
  return kExitOk;
}

int cmd_invert(const RunConfig& c, const InvertArgs& args, std::ostream& out) {
  if (args.mode != "plane" && args.mode != "albedo") throw ConfigError("invert mode must be plane or albedo");
  const ReflectionStack stack = load_stack(c, args.in);
  const NoiseParams noise = pick_noise(c, stack.noise);
  out << std::fixed << std::setprecision(4);

  if (args.mode == "plane") {
    const PlaneInversion r = invert_plane(stack, noise, c.inversion);
    json doc = plane_estimate_to_json(r.estimate);
    doc["initial"] = plane_estimate_to_json(r.initial);
    doc["tracks"] = r.tracks.size();
    doc["reference_map"] = r.report.reference;
    json profile = json::array();
    for (const auto& [theta, score] : r.tilt_profile) profile.push_back({theta, score});
    doc["tilt_profile"] = profile;
    doc["seconds"] = {{"tracking", r.seconds_tracking}, {"plane", r.seconds_plane}, {"tilt", r.seconds_tilt}};
    out << "tracks " << r.tracks.size() << "  objective " << r.estimate.objective << "\n";
    out << "plane theta " << r.estimate.params.theta << "  phi " << r.estimate.params.phi << "  nu "
        << r.estimate.params.nu << "\n";
    if (stack.ground_truth_plane) {
      const double err = degrees(normal_angle(r.estimate.params.normal(), stack.ground_truth_plane->normal()));
      doc["ground_truth"] = plane_to_json(*stack.ground_truth_plane);
      doc["normal_error_deg"] = err;
      out << "normal error vs ground truth " << err << " deg\n";
    }
    if (!args.out.empty()) write_json_file(c.resolve(args.out), doc);
    return kExitOk;
  }

  FeatureTrackSet tracks;
  PlaneParams plane;
  if (!args.plane.empty()) {
    plane = plane_estimate_from_json(read_json_file(c.resolve(args.plane))).params;
    tracks = track_features(stack, c.inversion.detector);
  } else {
    PlaneInversion r = invert_plane(stack, noise, c.inversion);
    plane = r.estimate.params;
    tracks = std::move(r.tracks);
    out << "estimated plane theta " << plane.theta << "  phi " << plane.phi << "  nu " << plane.nu << "\n";
  }
  const AlbedoInversion a = invert_albedo(stack, plane, tracks, noise, c.inversion);
  const AdmmResult& res = a.admm;
  out << "admm iterations " << res.iterations << (res.converged ? " (converged)" : " (iteration limit)")
      << "  objective " << std::scientific << std::setprecision(4) << res.objective.back() << "  primal "
      << res.primal.back() << "  dual " << res.dual.back() << std::fixed << "\n";
  if (args.out.empty()) return kExitOk;
  const fs::path stem = chart_stem(c.resolve(args.out));
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  write_chart(stem, res.x, 1.0);
  const PlaneChart& ch = a.chart;
  json doc = {{"plane", plane_to_json(ch.plane)},
              {"offset", {ch.offset.x(), ch.offset.y()}},
              {"width_m", ch.width_m},
              {"height_m", ch.height_m},
              {"rows", ch.rows},
              {"cols", ch.cols},
              {"iterations", res.iterations},
              {"converged", res.converged},
              {"monotone", res.monotone},
              {"objective", res.objective},
              {"primal", res.primal},
              {"dual", res.dual},
              {"seconds", {{"operator", a.seconds_operator}, {"admm", a.seconds_admm}}}};
  write_json_file(stem.string() + ".json", doc);
  out << "wrote " << stem.string() << ".{png,f32,json}\n";
  return kExitOk;
}

int cmd_validate(const RunConfig& c, const ValidateArgs& args, std::ostream& out) {
  const Scene scene = load_scene(c.resolve(args.scene));
  const ValidateSettings& v = c.validate;
  VirtualSource source{scene.wall.origin, Rgb::Ones()};
  if (v.source >= 0) {
    if (v.source >= static_cast<int>(scene.sources.size())) throw ConfigError("validate.source is out of range");
    source = scene.sources[static_cast<std::size_t>(v.source)];
  }
  auto t = Clock::now();
  const ImageD oracle = render_oracle(scene, source, c.render);
  const double oracle_seconds = since(t);
  out << std::fixed << std::setprecision(4) << "oracle " << oracle_seconds << " s\n";
  if (v.oracle_reference_check) {
    const ImageD again = render_oracle(scene, source, c.render);
    out << "oracle vs oracle relative RMSE " << std::scientific << relative_rmse(again, oracle) << std::fixed << "\n";
  }
  out << std::setw(10) << "samples" << std::setw(14) << "rel RMSE" << std::setw(12) << "seconds" << std::setw(12)
      << "speedup" << "\n";
  bool monotone = true;
  double previous = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (int s : v.samples) {
    const HemisphereSampling sampling = HemisphereSampling::fibonacci(s);
    t = Clock::now();
    const ImageD fast = render_fast(scene, source, sampling, c.render);
    const double seconds = since(t);
    last = relative_rmse(fast, oracle);
    monotone = monotone && last < previous;
    previous = last;
    out << std::setw(10) << s << std::setw(14) << last << std::setw(12) << seconds << std::setw(12)
        << (seconds > 0 ? oracle_seconds / seconds : 0.0) << "\n";
  }
  const bool pass = monotone && last <= v.threshold;
  out << (pass ? "PASS" : "FAIL") << ": error " << (monotone ? "decreases" : "does not decrease")
      << " monotonically, final " << last * 100.0 << "% against limit " << v.threshold * 100.0 << "%\n";
  return pass ? kExitOk : kExitValidation;
}

int cmd_dataset(const RunConfig& c, const DatasetArgs& args, std::ostream& out) {
  const DatasetSettings& d = c.dataset;
  if (d.mnist.empty()) throw ConfigError("dataset needs an IDX digit file (--mnist)");
  SceneSampler sampler;
  sampler.digits = std::make_shared<const std::vector<ImageD>>(load_digit_images(c.resolve(d.mnist)));
  sampler.seed = d.seed;
  sampler.wall.rows = sampler.wall.cols = d.wall_resolution;
  const double tilt = d.tilt_deg * kPi / 180.0;
  const double rot = d.rotation_deg * kPi / 180.0;
  sampler.tilt = {-tilt, tilt};
  sampler.rotation = {-rot, rot};
  sampler.shift_x = sampler.shift_y = sampler.shift_z = {-d.shift_m, d.shift_m};
  sampler.exponent = d.exponent;
  sampler.specular_scale = d.specular_scale;
  try {
    sampler.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("dataset: ") + e.what());
  }

  DatasetOptions o;
  o.samples = d.samples;
  o.noise = c.simulate.noise;
  o.noise_params = pick_noise(c, std::nullopt);
  o.auto_exposure = c.simulate.auto_exposure;
  o.settings = c.render;
  o.threads = d.threads;
  std::size_t rendered = 0;
  double render_seconds = 0.0;
  o.on_example = [&](std::size_t k, bool skipped, double seconds) {
    if (!skipped) {
      ++rendered;
      render_seconds += seconds;
    }
    out << "example " << k << (skipped ? " complete, skipped" : "") << "  " << std::fixed << std::setprecision(3)
        << seconds << " s\n"
        << std::flush;
  };
  const auto t0 = Clock::now();
  const DatasetManifest m = generate_dataset(sampler, d.count, c.resolve(args.out), o);
  const double total = since(t0);
  const std::size_t maps = static_cast<std::size_t>(sampler.grid_rows) * sampler.grid_cols;
  out << std::fixed << std::setprecision(3) << "wrote " << m.count << " examples to " << c.resolve(args.out).string()
      << " in " << total << " s (" << (total > 0 ? static_cast<double>(m.count) / total : 0.0)
      << " examples/s)\n";
  if (rendered > 0) {
    const double per_map = render_seconds / static_cast<double>(rendered * maps);
    out << "per measurement " << per_map << " s at " << sampler.wall.rows << "x" << sampler.wall.cols << ", "
        << d.samples << " samples, 1 thread per example (reference GPU figure 0.1 s at full resolution)\n";
  }
  return kExitOk;
}

int run_command(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const RenderError& e) {
    err << "render error: " << e.what() << "\n";
    return kExitRender;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const OptimizationFailure& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const EmptyTracks& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const DegenerateGeometry& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace nlos
