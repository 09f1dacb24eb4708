#include "nlos/cli/config.hpp"

#include <fstream>
#include <map>
#include <regex>
#include <set>

#include "nlos/core/error.hpp"
#include "nlos/core/scene_io.hpp"

namespace nlos {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

/// Reads the keys of one object, rejecting any key that is never asked for.
class Section {
 public:
  Section(const json& j, std::string where, std::set<std::string> allowed) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.contains(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) const {
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  void range(const char* key, Range& out) const {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(where_ + "." + key + ": expected [lo, hi]");
    }
    out = {v[0].get<double>(), v[1].get<double>()};
  }

  const json* child(const char* key) const { return j_.contains(key) ? &j_.at(key) : nullptr; }
  std::string path(const char* key) const { return where_ + "." + key; }

 private:
  const json& j_;
  std::string where_;
};

const char* renderer_name(RendererKind k) { return k == RendererKind::fast ? "fast" : "oracle"; }

}  // namespace

std::pair<int, int> parse_grid(const std::string& text) {
  static const std::regex re(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw ConfigError("grid '" + text + "' is not of the form RxC");
  const int r = std::stoi(m[1]);
  const int c = std::stoi(m[2]);
  if (r < 1 || c < 1) throw ConfigError("grid '" + text + "' needs at least one row and column");
  return {r, c};
}

RendererKind parse_renderer(const std::string& text) {
  if (text == "fast") return RendererKind::fast;
  if (text == "oracle") return RendererKind::oracle;
  throw ConfigError("renderer '" + text + "' is not fast or oracle");
}

fs::path RunConfig::resolve(const fs::path& p) const { return p.is_absolute() ? p : workdir / p; }

void RunConfig::check() const {
  if (simulate.samples < 1) throw ConfigError("render.samples must be positive");
  if (simulate.grid_rows < 1 || simulate.grid_cols < 1) throw ConfigError("render.grid must be at least 1x1");
  if (!(simulate.grid_fraction > 0.0 && simulate.grid_fraction <= 1.0)) {
    throw ConfigError("render.grid_fraction must be in (0, 1]");
  }
  if (simulate.auto_exposure < 0.0) throw ConfigError("render.auto_exposure must be >= 0");
  if (inversion.beta < 0.0) throw ConfigError("solver.beta must be >= 0");
  if (inversion.chart_resolution < 2) throw ConfigError("solver.chart_resolution must be at least 2");
  if (inversion.chart_margin < 0.0) throw ConfigError("solver.chart_margin must be >= 0");
  if (validate.samples.empty()) throw ConfigError("validate.samples must not be empty");
  for (int s : validate.samples) {
    if (s < 1) throw ConfigError("validate.samples entries must be positive");
  }
  if (dataset.count < 1) throw ConfigError("dataset.count must be positive");
  if (dataset.samples < 1 || dataset.wall_resolution < 2) throw ConfigError("dataset samples and resolution must be positive");
  try {
    render.validate();
    if (noise) noise->validate();
    inversion.admm.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  const Section top(doc, "config", {"workdir", "render", "noise", "solver", "validate", "dataset"});
  std::string workdir = c.workdir.string();
  top.get("workdir", workdir);
  c.workdir = workdir;

  if (const json* j = top.child("render")) {
    const Section s(*j, "render",
                    {"renderer", "samples", "grid", "grid_fraction", "seed", "noise", "auto_exposure", "png", "threads",
                     "epsilon", "density", "grazing_clamp", "include_direct_bounce", "clamp_negative"});
    std::string renderer = renderer_name(c.simulate.renderer);
    s.get("renderer", renderer);
    c.simulate.renderer = parse_renderer(renderer);
    s.get("samples", c.simulate.samples);
    if (j->contains("grid")) {
      std::string grid;
      s.get("grid", grid);
      std::tie(c.simulate.grid_rows, c.simulate.grid_cols) = parse_grid(grid);
      c.simulate.grid_from_scene = false;
    }
    s.get("grid_fraction", c.simulate.grid_fraction);
    s.get("seed", c.simulate.seed);
    s.get("noise", c.simulate.noise);
    s.get("auto_exposure", c.simulate.auto_exposure);
    s.get("png", c.simulate.png);
    s.get("threads", c.render.threads);
    s.get("epsilon", c.render.epsilon);
    s.get("density", c.render.density);
    s.get("grazing_clamp", c.render.grazing_clamp);
    s.get("include_direct_bounce", c.render.include_direct_bounce);
    s.get("clamp_negative", c.render.clamp_negative);
  }
  if (const json* j = top.child("noise")) {
    try {
      c.noise = noise_from_json(*j);
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string("noise: ") + e.what());
    }
  }
  if (const json* j = top.child("solver")) {
    const Section s(*j, "solver",
                    {"beta", "tv", "rho", "iters", "chart_resolution", "chart_margin", "resolve_tilt", "top_features",
                     "tilt_min", "tilt_max", "tilt_grid", "tilt_refine", "contrast_threshold", "ratio", "min_inliers",
                     "presmooth_px"});
    InversionConfig& v = c.inversion;
    s.get("beta", v.beta);
    s.get("tv", v.admm.lambda);
    s.get("rho", v.admm.rho);
    s.get("iters", v.admm.max_iterations);
    s.get("chart_resolution", v.chart_resolution);
    s.get("chart_margin", v.chart_margin);
    s.get("resolve_tilt", v.resolve_tilt);
    s.get("top_features", v.solver.top_features);
    s.get("tilt_min", v.tilt.theta_min);
    s.get("tilt_max", v.tilt.theta_max);
    s.get("tilt_grid", v.tilt.grid);
    s.get("tilt_refine", v.tilt.refine);
    s.get("contrast_threshold", v.detector.contrast_threshold);
    s.get("ratio", v.detector.ratio);
    s.get("min_inliers", v.detector.min_inliers);
    s.get("presmooth_px", v.detector.presmooth_px);
  }
  if (const json* j = top.child("validate")) {
    const Section s(*j, "validate", {"samples", "threshold", "source", "oracle_reference_check"});
    s.get("samples", c.validate.samples);
    s.get("threshold", c.validate.threshold);
    s.get("source", c.validate.source);
    s.get("oracle_reference_check", c.validate.oracle_reference_check);
  }
  if (const json* j = top.child("dataset")) {
    const Section s(*j, "dataset",
                    {"mnist", "count", "seed", "samples", "wall_resolution", "threads", "tilt_deg", "rotation_deg",
                     "shift_m", "exponent", "specular_scale"});
    DatasetSettings& d = c.dataset;
    s.get("mnist", d.mnist);
    s.get("count", d.count);
    s.get("seed", d.seed);
    s.get("samples", d.samples);
    s.get("wall_resolution", d.wall_resolution);
    s.get("threads", d.threads);
    s.get("tilt_deg", d.tilt_deg);
    s.get("rotation_deg", d.rotation_deg);
    s.get("shift_m", d.shift_m);
    s.range("exponent", d.exponent);
    s.range("specular_scale", d.specular_scale);
  }
  c.check();
  return c;
}

json config_to_json(const RunConfig& c) {
  const SimulateSettings& sim = c.simulate;
  const InversionConfig& v = c.inversion;
  const DatasetSettings& d = c.dataset;
  json doc = {
      {"workdir", c.workdir.string()},
      {"render",
       {{"renderer", renderer_name(sim.renderer)},
        {"samples", sim.samples},
        {"grid", std::to_string(sim.grid_rows) + "x" + std::to_string(sim.grid_cols)},
        {"grid_fraction", sim.grid_fraction},
        {"seed", sim.seed},
        {"noise", sim.noise},
        {"auto_exposure", sim.auto_exposure},
        {"png", sim.png},
        {"threads", c.render.threads},
        {"epsilon", c.render.epsilon},
        {"density", c.render.density},
        {"grazing_clamp", c.render.grazing_clamp},
        {"include_direct_bounce", c.render.include_direct_bounce},
        {"clamp_negative", c.render.clamp_negative}}},
      {"solver",
       {{"beta", v.beta},
        {"tv", v.admm.lambda},
        {"rho", v.admm.rho},
        {"iters", v.admm.max_iterations},
        {"chart_resolution", v.chart_resolution},
        {"chart_margin", v.chart_margin},
        {"resolve_tilt", v.resolve_tilt},
        {"top_features", v.solver.top_features},
        {"tilt_min", v.tilt.theta_min},
        {"tilt_max", v.tilt.theta_max},
        {"tilt_grid", v.tilt.grid},
        {"tilt_refine", v.tilt.refine},
        {"contrast_threshold", v.detector.contrast_threshold},
        {"ratio", v.detector.ratio},
        {"min_inliers", v.detector.min_inliers},
        {"presmooth_px", v.detector.presmooth_px}}},
      {"validate",
       {{"samples", c.validate.samples},
        {"threshold", c.validate.threshold},
        {"source", c.validate.source},
        {"oracle_reference_check", c.validate.oracle_reference_check}}},
      {"dataset",
       {{"mnist", d.mnist},
        {"count", d.count},
        {"seed", d.seed},
        {"samples", d.samples},
        {"wall_resolution", d.wall_resolution},
        {"threads", d.threads},
        {"tilt_deg", d.tilt_deg},
        {"rotation_deg", d.rotation_deg},
        {"shift_m", d.shift_m},
        {"exponent", {d.exponent.lo, d.exponent.hi}},
        {"specular_scale", {d.specular_scale.lo, d.specular_scale.hi}}}},
  };
  if (c.noise) doc["noise"] = noise_to_json(*c.noise);
  return doc;
}

RunConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace nlos
