#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "nlos/core/error.hpp"
#include "nlos/core/noise.hpp"
#include "nlos/dataset/generate.hpp"
#include "nlos/dataset/idx.hpp"
#include "nlos/dataset/sampler.hpp"
#include "nlos/inverse/chart.hpp"
#include "nlos/inverse/estimate_plane.hpp"
#include "nlos/inverse/forward_operator.hpp"
#include "nlos/inverse/homography.hpp"
#include "nlos/inverse/mirror.hpp"
#include "nlos/inverse/pipeline.hpp"
#include "nlos/inverse/plane_objective.hpp"
#include "nlos/render/nlss.hpp"
#include "nlos/render/render.hpp"
#include "nlos/render/sampling.hpp"
#include "nlos/render/stack_render.hpp"
#include "support.hpp"

using namespace nlos;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kDeg = 180.0 / kPi;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Vec3> positions(const std::vector<VirtualSource>& sources) {
  std::vector<Vec3> out;
  for (const VirtualSource& s : sources) out.push_back(s.position);
  return out;
}

Outcome geometry_round_trip() {
  const WallGeometry wall;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto t = Clock::now();
  double worst = 0.0;
  int used = 0;
  int drawn = 0;
  while (used < 100000) {
    ++drawn;
    const PlaneParams plane{0.8 * u(rng), kPi * u(rng), 0.5 + 0.4 * u(rng), Vec3(0, 0, 0.4)};
    const Vec3 l(u(rng), u(rng), 0.0);
    const auto [ea, eb] = plane_chart_basis(plane.normal());
    const Vec3 p = plane.point() + 0.3 * u(rng) * ea + 0.3 * u(rng) * eb;
    const auto c = specular_mirror_point(l, p, plane, wall);
    if (!c) continue;
    ++used;
    worst = std::max(worst, (reproject_to_plane(*c, l, plane) - p).norm());
  }
  const double seconds = since(t);
  return {worst <= 1e-9 && seconds < 5.0,
          fmt("%d configurations (%d drawn, rest miss the wall), max error %.2e m, %.2f s", used, drawn, worst, seconds)};
}

Outcome gradient_oracle() {
  const WallGeometry wall;
  const PlaneParams truth{0.3, 0.7, 0.45, Vec3(0, 0, 0.4)};
  const auto sources = source_grid(wall, 5, 5, 0.5);
  const auto pos = positions(sources);
  const FeatureTrackSet tracks = synthetic_tracks(test::object_on(truth, 0.4), sources, wall, 50, 1.0, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const PlaneParams p{truth.theta + 0.3 * u(rng), truth.phi + 0.5 * u(rng), truth.nu + 0.2 * u(rng), truth.origin};
    const ObjectiveResult r = plane_objective(p, tracks, pos);
    Vec3 fd;
    for (int q = 0; q < 3; ++q) {
      PlaneParams a = p, b = p;
      double& va = q == 0 ? a.theta : q == 1 ? a.phi : a.nu;
      double& vb = q == 0 ? b.theta : q == 1 ? b.phi : b.nu;
      const double h = 1e-6 * std::max(1.0, std::abs(va));
      va += h;
      vb -= h;
      fd[q] = (plane_objective(a, tracks, pos).value - plane_objective(b, tracks, pos).value) / (2 * h);
    }
    worst = std::max(worst, (fd - r.gradient).norm() / std::max(fd.norm(), 1e-12));
  }
  return {worst <= 1e-5, fmt("100 points, max relative error %.2e", worst)};
}

Outcome plane_recovery() {
  const WallGeometry wall;
  const PlaneParams truth{0.3, 0.7, 0.45, Vec3(0, 0, 0.4)};
  const PlanarObject object = test::object_on(truth, 0.4);
  const auto sources = source_grid(wall, 5, 5, 0.5);
  double slowest = 0.0;
  auto solve = [&](double jitter, std::uint64_t seed) {
    const FeatureTrackSet tracks = synthetic_tracks(object, sources, wall, 50, jitter, seed);
    const auto t = Clock::now();
    const PlaneEstimate e = estimate_plane(tracks, sources);
    slowest = std::max(slowest, since(t));
    return e.params;
  };
  const PlaneParams clean = solve(0.0, 100);
  const double clean_angle = normal_angle(clean.normal(), truth.normal()) * kDeg;
  const double clean_nu = std::abs(clean.nu - truth.nu);
  std::vector<double> angles, nus, line_angles;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PlaneParams p = solve(1.0, 200 + seed);
    angles.push_back(normal_angle(p.normal(), truth.normal()) * kDeg);
    nus.push_back(std::abs(p.nu - truth.nu));
    // The tracks fix only the plane's intersection line with the wall; compare along it.
    const PlaneParams aligned = tilt_gauge_member(p, truth.theta);
    line_angles.push_back(normal_angle(aligned.normal(), truth.normal()) * kDeg);
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const double med_angle = median(angles);
  const double med_nu = median(nus);
  const bool pass = clean_angle <= 0.1 && clean_nu <= 1e-3 && med_angle <= 2.0 && med_nu <= 0.02 && slowest < 10.0;
  std::string d = fmt("noiseless: normal %.2f deg, nu %.3g m; 1 px jitter (20 seeds): median normal %.2f deg, "
                      "median nu %.3g m; slowest run %.2f s",
                      clean_angle, clean_nu, med_angle, med_nu, slowest);
  d += fmt("\n    note: the track objective is flat along the family of planes through the same wall line, so tilt "
           "is not identifiable from tracks; at the true tilt the recovered line gives median normal error %.2f deg",
           median(line_angles));
  return {pass, d};
}

/// Textured glossy planes used for the renderer criteria.
std::vector<Scene> renderer_scenes() {
  struct Pose {
    PlaneParams plane;
    double exponent;
    Vec3 source;
  };
  const std::vector<Pose> poses = {
      {{0.3, 0.5, 0.4, Vec3(0, 0, 0.4)}, 20.0, Vec3(0, 0, 0)},
      {{0.5, 2.0, 0.3, Vec3(0, 0, 0.4)}, 50.0, Vec3(0.3, -0.2, 0)},
      {{0.15, -1.0, 0.6, Vec3(0, 0, 0.4)}, 5.0, Vec3(-0.4, 0.3, 0)},
  };
  const int t = 128;
  std::vector<Scene> scenes;
  for (const Pose& p : poses) {
    Scene s;
    s.wall.rows = s.wall.cols = 128;
    PlanarObject o;
    o.plane = p.plane;
    o.width_m = o.height_m = 0.5;
    o.material.diffuse = AlbedoMap::zeros(t, t);
    o.material.specular = AlbedoMap::zeros(t, t);
    o.material.exponent = p.exponent;
    for (int r = 0; r < t; ++r) {
      for (int c = 0; c < t; ++c) {
        const double u = static_cast<double>(c) / t;
        const double v = static_cast<double>(r) / t;
        o.material.diffuse.at(r, c) = Rgb(0.5 + 0.3 * std::sin(6 * u), 0.5 + 0.3 * std::cos(5 * v), 0.6);
        o.material.specular.at(r, c) = Rgb(0.3 + 0.2 * std::sin(4 * u + 3 * v), 0.3, 0.2);
      }
    }
    s.hidden = o;
    s.sources = {VirtualSource{p.source, Rgb::Ones()}};
    scenes.push_back(std::move(s));
  }
  return scenes;
}

struct OracleRun {
  ImageD image;
  double seconds = 0.0;
};

/// The oracle at its default tessellation, shared by the convergence and speed criteria.
const std::vector<OracleRun>& oracle_runs(const std::vector<Scene>& scenes) {
  static const std::vector<OracleRun> runs = [&] {
    std::vector<OracleRun> out;
    for (const Scene& s : scenes) {
      const auto t = Clock::now();
      ImageD img = render_oracle(s, s.sources[0]);
      out.push_back({std::move(img), since(t)});
    }
    return out;
  }();
  return runs;
}

Outcome renderer_convergence() {
  const std::vector<Scene> scenes = renderer_scenes();
  const auto& oracle = oracle_runs(scenes);
  bool pass = true;
  std::string d;
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    double previous = std::numeric_limits<double>::infinity();
    bool monotone = true;
    double last = 0.0;
    d += fmt("\n    scene %zu:", k);
    for (int s : {25, 100, 10000}) {
      last = relative_rmse(render_fast(scenes[k], scenes[k].sources[0], HemisphereSampling::fibonacci(s)), oracle[k].image);
      monotone = monotone && last < previous;
      previous = last;
      d += fmt(" S=%d %.2f%%", s, 100 * last);
    }
    pass = pass && monotone && last <= 0.02;
  }
  return {pass, fmt("%zu textured scenes at 128x128", scenes.size()) + d};
}

double fastest_of(int repeats, const std::function<void()>& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < repeats; ++k) {
    const auto t = Clock::now();
    f();
    best = std::min(best, since(t));
  }
  return best;
}

Outcome renderer_speed() {
  const std::vector<Scene> scenes = renderer_scenes();
  const auto& oracle = oracle_runs(scenes);
  const std::vector<int> ladder = {1000, 1500, 2000, 2500, 3000, 4000, 5000, 6000, 8000, 10000, 15000, 20000};
  double worst_speedup = std::numeric_limits<double>::infinity();
  double oracle_total = 0.0;
  double fast_total = 0.0;
  std::string d;
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    const Scene& s = scenes[k];
    // Reference: 2 x 2 patches per texel. The default oracle is one patch per texel, its
    // coarsest setting, since the tessellation follows the texel grid.
    RenderSettings fine;
    fine.density = 2.0 * 128 / 0.5;
    const ImageD reference = render_oracle(s, s.sources[0], fine);
    const double oracle_error = relative_rmse(oracle[k].image, reference);
    int chosen = -1;
    double fast_error = 0.0;
    for (int n : ladder) {
      const HemisphereSampling sampling = HemisphereSampling::fibonacci(n);
      fast_error = relative_rmse(render_fast(s, s.sources[0], sampling), reference);
      if (fast_error <= 0.02) {
        chosen = n;
        break;
      }
    }
    if (chosen < 0 || oracle_error > 0.02) {
      worst_speedup = 0.0;
      d += fmt("\n    scene %zu: no setting reaches 2%% (oracle %.2g%%, fast %.2f%% at S=%d)", k, 100 * oracle_error,
               100 * fast_error, ladder.back());
      continue;
    }
    const HemisphereSampling sampling = HemisphereSampling::fibonacci(chosen);
    const double fast_seconds = fastest_of(3, [&] { render_fast(s, s.sources[0], sampling); });
    const double speedup = oracle[k].seconds / fast_seconds;
    worst_speedup = std::min(worst_speedup, speedup);
    oracle_total += oracle[k].seconds;
    fast_total += fast_seconds;
    d += fmt("\n    scene %zu: oracle %.2f s (error %.1e), fast S=%d %.3f s (error %.2f%%), speedup %.0fx", k,
             oracle[k].seconds, oracle_error, chosen, fast_seconds, 100 * fast_error, speedup);
  }

  if (fast_total > 0.0) d += fmt("\n    info: summed over scenes the speedup is %.0fx", oracle_total / fast_total);

  // Untextured plane: the oracle may use very coarse patches, so there is little to gain.
  {
    Scene s = scenes[0];
    PlanarObject o = std::get<PlanarObject>(s.hidden);
    o.material.diffuse = AlbedoMap::constant(Rgb::Constant(0.6));
    o.material.specular = AlbedoMap::constant(Rgb::Constant(0.3));
    s.hidden = o;
    RenderSettings dense;
    dense.density = 400.0;
    const ImageD reference = render_oracle(s, s.sources[0], dense);
    double oracle_seconds = 0.0;
    double density = 0.0;
    for (double dd : {5.0, 10.0, 25.0, 50.0, 100.0, 200.0}) {
      RenderSettings rs;
      rs.density = dd;
      ImageD img;
      oracle_seconds = fastest_of(1, [&] { img = render_oracle(s, s.sources[0], rs); });
      density = dd;
      if (relative_rmse(img, reference) <= 0.02) break;
    }
    int chosen = ladder.back();
    for (int n : ladder) {
      if (relative_rmse(render_fast(s, s.sources[0], HemisphereSampling::fibonacci(n)), reference) <= 0.02) {
        chosen = n;
        break;
      }
    }
    const HemisphereSampling sampling = HemisphereSampling::fibonacci(chosen);
    const double fast_seconds = fastest_of(3, [&] { render_fast(s, s.sources[0], sampling); });
    d += fmt("\n    info, untextured plane: oracle at %.0f patches/m %.3f s vs fast S=%d %.3f s, speedup %.1fx", density,
             oracle_seconds, chosen, fast_seconds, oracle_seconds / fast_seconds);
  }

  {
    Scene s = scenes[0];
    s.wall.rows = s.wall.cols = 256;
    const HemisphereSampling sampling = HemisphereSampling::fibonacci(10000);
    const double seconds = fastest_of(2, [&] { render_fast(s, s.sources[0], sampling); });
    d += fmt("\n    info: one 256x256 map at S=10^4 takes %.3f s on one CPU core (GPU reference: 0.1 s, not enforced);"
             " the 600x path-tracer comparison needs the original path tracer and is not reproduced",
             seconds);
  }
  return {worst_speedup >= 50.0, fmt("matched 2%% accuracy, minimum speedup %.0fx", worst_speedup) + d};
}

Outcome noise_model() {
  NoiseParams p;
  p.kappa = 1.0 / 0.03;
  p.sigma = 0.05;
  p.gain = 1.0;
  ImageD img(1000, 1000, 1);
  for (double& v : img.storage()) v = 0.5;
  const ImageD noisy = apply_sensor_noise(img, p, 12345);
  double mean = 0.0;
  for (double v : noisy.data()) mean += v;
  mean /= static_cast<double>(noisy.size());
  double var = 0.0;
  for (double v : noisy.data()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(noisy.size() - 1);
  const double expected_var = 0.5 / p.kappa + p.sigma * p.sigma;
  const double mean_err = std::abs(mean - 0.5) / 0.5;
  const double var_err = std::abs(var - expected_var) / expected_var;
  return {mean_err <= 0.002 && var_err <= 0.01,
          fmt("10^6 draws: mean %.5f (%.3f%% off), variance %.5f vs %.5f (%.2f%% off)", mean, 100 * mean_err, var,
              expected_var, 100 * var_err)};
}

Outcome operator_correctness() {
  WallGeometry wall;
  wall.rows = wall.cols = 64;
  PlaneChart chart;
  chart.plane = {0.25, 0.8, 0.4, Vec3(0, 0, 0.4)};
  chart.width_m = chart.height_m = 0.4;
  chart.rows = chart.cols = 32;
  const auto sources = source_grid(wall, 5, 5, 0.5);
  OperatorConfig cfg;
  cfg.beta = 0.05;
  const ForwardOperator op = ForwardOperator::from_plane(wall, chart, sources, cfg);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_image = [&](int r, int c) {
    ImageD img(r, c, 3);
    for (double& v : img.storage()) v = u(rng);
    return img;
  };
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ImageD x = random_image(32, 32);
    std::vector<ImageD> y;
    for (std::size_t i = 0; i < op.measurements(); ++i) y.push_back(random_image(64, 64));
    const std::vector<ImageD> ax = apply_forward(op, x);
    const ImageD aty = apply_adjoint(op, y);
    double lhs = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      for (std::size_t q = 0; q < y[i].size(); ++q) lhs += ax[i].storage()[q] * y[i].storage()[q];
    }
    double rhs = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) rhs += x.storage()[q] * aty.storage()[q];
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }

  // Impulse response: a Gaussian spot whose wall mass equals the chart-to-wall area scale
  // (lobe gain off). The wall is sampled finely enough that the spot spans several pixels.
  WallGeometry fine_wall = wall;
  fine_wall.rows = fine_wall.cols = 128;
  PlaneChart coarse = chart;
  coarse.rows = coarse.cols = 24;
  OperatorConfig spot_cfg;
  spot_cfg.beta = 0.05;
  spot_cfg.flat_field = false;
  const ForwardOperator sharp =
      ForwardOperator::from_plane(fine_wall, coarse, source_grid(fine_wall, 5, 5, 0.5), spot_cfg);
  ImageD impulse(24, 24, 1);
  impulse(12, 11) = 1.0;
  const std::vector<ImageD> response = apply_forward(sharp, impulse);
  const Vec2 ab = coarse.texel_coords(12, 11);
  const double texel_area = (coarse.width_m / coarse.cols) * (coarse.height_m / coarse.rows);
  const double pixel_area = fine_wall.pixel_width() * fine_wall.pixel_height();
  double worst_mass = 0.0;
  int checked = 0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    const Mat3& h = sharp.homographies()[i];
    // Spots reaching past the wall border lose mass off the wall.
    if (apply_homography(h, ab).cwiseAbs().maxCoeff() > 0.75) continue;
    const double e = 1e-5;
    const Vec2 da = (apply_homography(h, ab + Vec2(e, 0)) - apply_homography(h, ab - Vec2(e, 0))) / (2 * e);
    const Vec2 db = (apply_homography(h, ab + Vec2(0, e)) - apply_homography(h, ab - Vec2(0, e))) / (2 * e);
    const double expected = std::abs(da.x() * db.y() - da.y() * db.x()) * texel_area / pixel_area;
    double mass = 0.0;
    for (double v : response[i].data()) mass += v;
    worst_mass = std::max(worst_mass, std::abs(mass - expected) / expected);
    ++checked;
  }
  return {worst <= 1e-10 && worst_mass <= 0.01 && checked > 0,
          fmt("adjoint test on 100 pairs, max relative gap %.2e; impulse mass vs warp area scale, max error %.2f%% "
              "over %d maps",
              worst, 100 * worst_mass, checked)};
}

Outcome end_to_end() {
  const auto t = Clock::now();
  Scene scene;
  scene.wall.rows = scene.wall.cols = 256;
  const double exponent = 500.0;
  const PlanarObject object = test::blob_object({0.3, 0.7, 0.45, Vec3(0, 0, 0.4)}, 0.4, 64, exponent);
  scene.hidden = object;
  const NoiseParams noise;
  scene.noise = noise;
  const auto grid = source_grid(scene.wall, 5, 5, 0.5);
  scene.sources = grid;
  StackOptions so;
  so.samples = 20000;
  so.noise = noise;
  so.auto_exposure = 1.0;
  so.seed = 3;
  const ReflectionStack stack = render_stack(scene, grid, so);
  const double render_seconds = since(t);

  InversionConfig cfg;
  cfg.beta = 1.0 / std::sqrt(exponent);
  const PlaneInversion plane = invert_plane(stack, noise, cfg);
  const AlbedoInversion albedo = invert_albedo(stack, plane.estimate.params, plane.tracks, noise, cfg);
  const double total = since(t);

  const ImageD truth = resample_specular_via(object, albedo.chart, grid[12].position, stack.wall);
  const double quality = psnr(albedo.admm.x, truth);
  const double angle = normal_angle(plane.estimate.params.normal(), object.plane.normal()) * kDeg;
  const double track_angle = normal_angle(plane.initial.params.normal(), object.plane.normal()) * kDeg;
  return {quality >= 22.0 && angle <= 3.0 && total <= 120.0,
          fmt("256x256, 5x5 sources: PSNR %.2f dB, normal error %.2f deg (track fit alone %.1f deg), %zu tracks, "
              "ADMM residuals %s; %.1f s total (render %.1f, tracking %.1f, plane %.1f, tilt %.1f, operator %.1f, "
              "ADMM %.1f)",
              quality, angle, track_angle, plane.tracks.size(), albedo.admm.monotone ? "decreasing" : "not decreasing",
              total, render_seconds, plane.seconds_tracking, plane.seconds_plane, plane.seconds_tilt,
              albedo.seconds_operator, albedo.seconds_admm)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

Outcome dataset_determinism() {
  std::vector<ImageD> digits(3, ImageD(28, 28, 1));
  for (int k = 5; k < 23; ++k) {
    digits[0](k, 14) = 1.0;
    digits[1](k, 14) = digits[1](14, k) = 1.0;
    digits[2](k, k) = digits[2](k, 27 - k) = 0.9;
  }
  SceneSampler sampler;
  sampler.seed = 2024;
  sampler.digits = std::make_shared<const std::vector<ImageD>>(digits);
  const fs::path root = fs::temp_directory_path() / "nlos_acceptance_dataset";
  fs::remove_all(root);
  DatasetOptions o;
  o.samples = 2000;
  generate_dataset(sampler, 10, root / "a", o);
  const DatasetManifest m = generate_dataset(sampler, 10, root / "b", o);
  const auto ta = tree(root / "a");
  const bool identical = ta == tree(root / "b");

  int reloaded = 0;
  for (const DatasetExample& e : m.examples) {
    const ReflectionStack s = read_nlss(root / "b" / e.directory / "stack.nlss");
    s.validate();
    reloaded += s.size() == 25 ? 1 : 0;
  }

  int rejected = 0;
  std::vector<std::uint8_t> good = encode_idx_images(digits);
  const std::vector<std::vector<std::uint8_t>> bad = {
      [&] { auto b = good; b[3] = 0x01; return b; }(),                       // label-file magic
      [&] { auto b = good; b.resize(b.size() - 1); return b; }(),            // truncated payload
      std::vector<std::uint8_t>(good.begin(), good.begin() + 7),             // truncated header
      [&] { auto b = good; b[8] = b[9] = b[10] = b[11] = 0; return b; }(),  // zero rows
  };
  for (const auto& b : bad) {
    try {
      parse_idx_images(b);
    } catch (const FormatError&) {
      ++rejected;
    }
  }
  const bool parsed = parse_idx_images(good).size() == digits.size();
  fs::remove_all(root);
  return {identical && reloaded == 10 && rejected == static_cast<int>(bad.size()) && parsed,
          fmt("two 10-example runs %s (%zu files); %d/10 stacks reload and validate; %d/%zu malformed IDX inputs "
              "rejected",
              identical ? "byte-identical" : "DIFFER", ta.size(), reloaded, rejected, bad.size())};
}

}  // namespace

/// Optional arguments select criteria by number; all run by default.
int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"geometry round trip", geometry_round_trip},
      {"gradient oracle", gradient_oracle},
      {"plane recovery", plane_recovery},
      {"renderer convergence", renderer_convergence},
      {"renderer performance", renderer_speed},
      {"noise model", noise_model},
      {"operator correctness", operator_correctness},
      {"end-to-end planar inversion", end_to_end},
      {"dataset determinism and format", dataset_determinism},
  };
  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k >= 1 && k <= static_cast<int>(criteria.size())) selected[static_cast<std::size_t>(k - 1)] = true;
  }
  int failed = 0;
  int ran = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!selected[k]) continue;
    ++ran;
    Outcome o;
    const auto t = Clock::now();
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s (%.1f s) %s\n", k + 1, criteria[k].first, o.pass ? "PASS" : "FAIL", since(t),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria pass\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
