#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>

#include "nlos/core/error.hpp"
#include "nlos/core/image_io.hpp"
#include "nlos/dataset/generate.hpp"
#include "nlos/dataset/idx.hpp"
#include "nlos/dataset/sampler.hpp"
#include "nlos/render/nlss.hpp"

using namespace nlos;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> idx_header(std::uint32_t magic, std::uint32_t count, std::uint32_t rows, std::uint32_t cols) {
  std::vector<std::uint8_t> b;
  for (std::uint32_t v : {magic, count, rows, cols}) {
    for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
  }
  return b;
}

/// Four 28 x 28 strokes: a bar, a cross, a box and a diagonal.
std::shared_ptr<const std::vector<ImageD>> toy_digits() {
  std::vector<ImageD> d(4, ImageD(28, 28, 1));
  for (int k = 6; k < 22; ++k) {
    d[0](k, 14) = 1.0;
    d[1](k, 14) = d[1](14, k) = 1.0;
    d[2](6, k) = d[2](21, k) = d[2](k, 6) = d[2](k, 21) = 1.0;
    d[3](k, k) = 0.8;
  }
  return std::make_shared<const std::vector<ImageD>>(std::move(d));
}

SceneSampler small_sampler(std::uint64_t seed) {
  SceneSampler s;
  s.seed = seed;
  s.wall.rows = s.wall.cols = 32;
  s.grid_rows = s.grid_cols = 3;
  s.digits = toy_digits();
  return s;
}

DatasetOptions quick_options() {
  DatasetOptions o;
  o.samples = 1000;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative path -> contents for every regular file below `root`.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nlos_test_dataset_" + name);
  fs::remove_all(p);
  return p;
}

/// Kolmogorov distribution tail P(K > x).
double kolmogorov_tail(double x) {
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) s += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace

TEST_CASE("IDX header and pixels parse") {
  std::vector<std::uint8_t> b = idx_header(0x803, 2, 2, 3);
  for (int k = 0; k < 12; ++k) b.push_back(static_cast<std::uint8_t>(k == 0 ? 255 : k));
  const std::vector<ImageD> imgs = parse_idx_images(b);
  REQUIRE(imgs.size() == 2);
  CHECK(imgs[0].rows() == 2);
  CHECK(imgs[0].cols() == 3);
  CHECK(imgs[0](0, 0) == 1.0);
  CHECK(imgs[1](1, 2) == doctest::Approx(11.0 / 255.0));
  CHECK(encode_idx_images(imgs) == b);
}

TEST_CASE("IDX rejects a label-file magic and names the offset") {
  std::vector<std::uint8_t> b = idx_header(0x801, 1, 1, 1);
  b.push_back(0);
  try {
    parse_idx_images(b);
    FAIL("no exception");
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("offset 0") != std::string::npos);
    CHECK(msg.find("801") != std::string::npos);
  }
}

TEST_CASE("IDX rejects truncated payloads and headers") {
  std::vector<std::uint8_t> b = idx_header(0x803, 2, 4, 4);
  b.resize(b.size() + 20);
  CHECK_THROWS_AS(parse_idx_images(b), FormatError);
  const std::vector<std::uint8_t> short_header(b.begin(), b.begin() + 10);
  CHECK_THROWS_AS(parse_idx_images(short_header), FormatError);
  CHECK_THROWS_AS(load_digit_images("/nonexistent/digits.idx"), IoError);
}

TEST_CASE("sampler is a pure function of seed and index") {
  const SceneSampler s = small_sampler(42);
  for (std::size_t i : {0u, 5u, 999u}) {
    CHECK(pose_to_json(sample_pose(s, i)) == pose_to_json(sample_pose(s, i)));
  }
  CHECK(pose_to_json(sample_pose(s, 0)) != pose_to_json(sample_pose(s, 1)));
  CHECK(pose_to_json(sample_pose(s, 3)) != pose_to_json(sample_pose(small_sampler(43), 3)));
}

TEST_CASE("exponent draws are uniform on their range") {
  const SceneSampler s = small_sampler(9);
  const int n = 10000;
  std::vector<double> e;
  for (int i = 0; i < n; ++i) e.push_back(sample_pose(s, static_cast<std::size_t>(i)).exponent);
  std::sort(e.begin(), e.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = e[i] / 512.0;
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
  }
  const double p = kolmogorov_tail(std::sqrt(static_cast<double>(n)) * d);
  CHECK(p > 0.01);
  CHECK(e.front() >= 0.0);
  CHECK(e.back() <= 512.0);
}

TEST_CASE("degenerate ranges give the canonical pose") {
  SceneSampler s = small_sampler(1);
  s.rotation = s.shift_x = s.shift_y = s.shift_z = s.tilt = Range{0.0, 0.0};
  s.azimuth = Range{0.5, 0.5};
  s.exponent = Range{100.0, 100.0};
  s.specular_scale = Range{0.3, 0.3};
  const SampledPose p = sample_pose(s, 17);
  CHECK(p.rotation == 0.0);
  CHECK(p.shift == Vec3::Zero());
  CHECK(p.theta == 0.0);
  CHECK(p.phi == 0.5);
  CHECK(p.exponent == 100.0);
  CHECK(p.specular_scale == 0.3);
  const Scene scene = scene_from_pose(s, p);
  const PlanarObject& o = std::get<PlanarObject>(scene.hidden);
  CHECK(o.plane.nu == doctest::Approx(0.5));
  CHECK(scene.sources.size() == 9);
}

TEST_CASE("sampler validation rejects bad ranges") {
  SceneSampler s = small_sampler(1);
  s.exponent = Range{0.0, 600.0};
  CHECK_THROWS_AS(s.validate(), ContractViolation);
  s = small_sampler(1);
  s.tilt = Range{0.2, 0.1};
  CHECK_THROWS_AS(s.validate(), ContractViolation);
  s = small_sampler(1);
  s.digits.reset();
  CHECK_THROWS_AS(s.validate(), ContractViolation);
}

TEST_CASE("generated examples have the full file set and reload") {
  const fs::path out = scratch("files");
  const SceneSampler s = small_sampler(5);
  const DatasetManifest m = generate_dataset(s, 3, out, quick_options());
  REQUIRE(m.examples.size() == 3);
  for (const DatasetExample& e : m.examples) {
    for (const std::string f : {"stack.nlss", "albedo.f32", "albedo.png", "depth.f32", "depth.png", "example.json"}) {
      CHECK(fs::exists(out / e.directory / f));
    }
    const ReflectionStack st = read_nlss(out / e.directory / "stack.nlss");
    st.validate();
    CHECK(st.size() == 9);
  }
  const DatasetManifest back = read_manifest(out);
  CHECK(manifest_to_json(back) == manifest_to_json(m));
  fs::remove_all(out);
}

TEST_CASE("resuming an interrupted run reproduces a fresh run") {
  const SceneSampler s = small_sampler(6);
  const fs::path fresh = scratch("fresh");
  const fs::path resumed = scratch("resumed");
  generate_dataset(s, 4, fresh, quick_options());
  generate_dataset(s, 2, resumed, quick_options());
  fs::remove(resumed / "manifest.json");
  fs::remove(resumed / "example_000001" / "example.json");
  std::vector<bool> skipped(4, false);
  DatasetOptions o = quick_options();
  o.on_example = [&](std::size_t i, bool skip, double) { skipped[i] = skip; };
  generate_dataset(s, 4, resumed, o);
  CHECK(skipped[0]);
  CHECK_FALSE(skipped[1]);
  CHECK_FALSE(skipped[3]);
  CHECK(tree(fresh) == tree(resumed));
  fs::remove_all(fresh);
  fs::remove_all(resumed);
}

TEST_CASE("wall-parallel examples carry constant depth labels") {
  SceneSampler s = small_sampler(8);
  s.tilt = Range{0.0, 0.0};
  s.rotation = Range{0.0, 0.0};
  const fs::path out = scratch("labels");
  const DatasetManifest m = generate_dataset(s, 2, out, quick_options());
  for (const DatasetExample& e : m.examples) {
    const ImageD depth = read_f32(out / e.directory / "depth.f32", 32, 32, 1);
    const ImageD albedo = read_f32(out / e.directory / "albedo.f32", 32, 32, 3);
    const double expected = s.origin.z() + s.nu + e.pose.shift.z();
    int hits = 0;
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        if (depth(r, c) == 0.0) {
          CHECK(albedo(r, c, 0) == 0.0);
          continue;
        }
        ++hits;
        CHECK(depth(r, c) == doctest::Approx(expected).epsilon(1e-6));
      }
    }
    CHECK(hits > 0);
  }
  fs::remove_all(out);
}
