#include "nlos/core/scene_io.hpp"

#include <fstream>
#include <set>
#include <string>

#include "nlos/core/error.hpp"
#include "nlos/core/image_io.hpp"

namespace nlos {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Rgb rgb(const json& j, const std::string& where) {
  if (j.is_number()) return Rgb::Constant(j.get<double>());
  const Vec3 v = vec3(j, where);
  return v.array();
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

AlbedoMap albedo(const json& j, const std::filesystem::path& base, const std::string& where) {
  if (j.is_object()) {
    check_keys(j, {"texture", "scale"}, where);
    if (!j.contains("texture")) throw ConfigError(where + ": texture reference needs 'texture'");
    std::filesystem::path file = j.at("texture").get<std::string>();
    if (file.is_relative()) file = base / file;
    return load_texture_png(file, j.value("scale", 1.0));
  }
  return AlbedoMap::constant(rgb(j, where));
}

PhongMaterial material(const json& j, const std::filesystem::path& base, const std::string& where) {
  check_keys(j, {"alpha_d", "alpha_s", "exponent"}, where);
  PhongMaterial m;
  if (j.contains("alpha_d")) m.diffuse = albedo(j.at("alpha_d"), base, where + ".alpha_d");
  if (j.contains("alpha_s")) m.specular = albedo(j.at("alpha_s"), base, where + ".alpha_s");
  m.exponent = j.value("exponent", 0.0);
  return m;
}

}  // namespace

json wall_to_json(const WallGeometry& w) {
  return {{"origin", to_json(w.origin)},
          {"u", to_json(w.u)},
          {"v", to_json(w.v)},
          {"extent", {w.width_m, w.height_m}},
          {"resolution", {w.rows, w.cols}}};
}

WallGeometry wall_from_json(const json& j) {
  check_keys(j, {"origin", "u", "v", "extent", "resolution"}, "wall");
  WallGeometry w;
  if (j.contains("origin")) w.origin = vec3(j.at("origin"), "wall.origin");
  if (j.contains("u")) w.u = vec3(j.at("u"), "wall.u");
  if (j.contains("v")) w.v = vec3(j.at("v"), "wall.v");
  if (j.contains("extent")) {
    w.width_m = j.at("extent").at(0).get<double>();
    w.height_m = j.at("extent").at(1).get<double>();
  }
  if (j.contains("resolution")) {
    w.rows = j.at("resolution").at(0).get<int>();
    w.cols = j.at("resolution").at(1).get<int>();
  }
  w.validate();
  return w;
}

json plane_to_json(const PlaneParams& p) {
  return {{"theta", p.theta}, {"phi", p.phi}, {"nu", p.nu}, {"origin", to_json(p.origin)}};
}

PlaneParams plane_from_json(const json& j) {
  check_keys(j, {"theta", "phi", "nu", "origin", "objective", "iterations"}, "plane");
  PlaneParams p;
  p.theta = j.at("theta").get<double>();
  p.phi = j.at("phi").get<double>();
  p.nu = j.at("nu").get<double>();
  if (j.contains("origin")) p.origin = vec3(j.at("origin"), "plane.origin");
  return p;
}

json noise_to_json(const NoiseParams& p) { return {{"kappa", p.kappa}, {"sigma", p.sigma}, {"gain", p.gain}}; }

NoiseParams noise_from_json(const json& j) {
  check_keys(j, {"kappa", "sigma", "gain"}, "noise");
  NoiseParams p;
  p.kappa = j.value("kappa", p.kappa);
  p.sigma = j.value("sigma", p.sigma);
  p.gain = j.value("gain", p.gain);
  p.validate();
  return p;
}

json source_to_json(const VirtualSource& s) {
  return {{"position", to_json(s.position)}, {"power", {s.power.x(), s.power.y(), s.power.z()}}};
}

VirtualSource source_from_json(const json& j) {
  check_keys(j, {"position", "power"}, "source");
  VirtualSource s;
  s.position = vec3(j.at("position"), "source.position");
  if (j.contains("power")) s.power = rgb(j.at("power"), "source.power");
  return s;
}

Scene scene_from_json(const json& doc, const std::filesystem::path& base) {
  check_keys(doc, {"wall", "sources", "source_grid", "hidden", "materials", "noise"}, "scene");
  Scene scene;
  if (doc.contains("wall")) scene.wall = wall_from_json(doc.at("wall"));
  if (doc.contains("sources")) {
    for (const auto& s : doc.at("sources")) scene.sources.push_back(source_from_json(s));
  }
  if (doc.contains("source_grid")) {
    const json& g = doc.at("source_grid");
    check_keys(g, {"rows", "cols", "fraction", "power"}, "source_grid");
    const Rgb power = g.contains("power") ? rgb(g.at("power"), "source_grid.power") : Rgb::Ones();
    auto grid = source_grid(scene.wall, g.value("rows", 5), g.value("cols", 5), g.value("fraction", 0.8), power);
    scene.sources.insert(scene.sources.end(), grid.begin(), grid.end());
  }

  std::vector<PhongMaterial> materials;
  if (doc.contains("materials")) {
    const json& m = doc.at("materials");
    if (m.is_array()) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        materials.push_back(material(m[i], base, "materials[" + std::to_string(i) + "]"));
      }
    } else {
      materials.push_back(material(m, base, "materials"));
    }
  }
  if (materials.empty()) materials.emplace_back();

  if (doc.contains("hidden")) {
    const json& h = doc.at("hidden");
    const std::string type = h.value("type", std::string("none"));
    if (type == "plane") {
      check_keys(h, {"type", "plane", "center_offset", "rotation", "extent", "material"}, "hidden");
      PlanarObject obj;
      obj.plane = plane_from_json(h.at("plane"));
      if (h.contains("center_offset")) {
        obj.center_offset = {h.at("center_offset").at(0).get<double>(), h.at("center_offset").at(1).get<double>()};
      }
      obj.rotation = h.value("rotation", 0.0);
      if (h.contains("extent")) {
        obj.width_m = h.at("extent").at(0).get<double>();
        obj.height_m = h.at("extent").at(1).get<double>();
      }
      const std::size_t mi = h.value("material", 0);
      if (mi >= materials.size()) throw ConfigError("hidden.material: index out of range");
      obj.material = materials[mi];
      scene.hidden = std::move(obj);
    } else if (type == "mesh") {
      check_keys(h, {"type", "vertices", "normals", "faces", "face_material"}, "hidden");
      TriangleMesh mesh;
      for (const auto& v : h.at("vertices")) mesh.vertices.push_back(vec3(v, "hidden.vertices"));
      for (const auto& f : h.at("faces")) mesh.faces.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
      if (h.contains("normals")) {
        for (const auto& n : h.at("normals")) mesh.normals.push_back(vec3(n, "hidden.normals"));
      } else {
        // Area-weighted vertex normals, oriented toward the wall.
        mesh.normals.assign(mesh.vertices.size(), Vec3::Zero());
        for (const auto& f : mesh.faces) {
          Vec3 fn = (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
          if (fn.z() > 0) fn = -fn;
          for (int idx : f) mesh.normals[idx] += fn;
        }
        for (auto& n : mesh.normals) n.normalize();
      }
      if (h.contains("face_material")) mesh.face_material = h.at("face_material").get<std::vector<int>>();
      mesh.materials = materials;
      scene.hidden = std::move(mesh);
    } else if (type == "none") {
      check_keys(h, {"type"}, "hidden");
    } else {
      throw ConfigError("hidden.type must be 'plane', 'mesh' or 'none', got '" + type + "'");
    }
  }
  if (doc.contains("noise")) scene.noise = noise_from_json(doc.at("noise"));
  try {
    scene.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("invalid scene: ") + e.what());
  }
  return scene;
}

Scene load_scene(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open scene file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scene file " + file.string() + ": " + e.what());
  }
  return scene_from_json(doc, file.parent_path());
}

}  // namespace nlos
