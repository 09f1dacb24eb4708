#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "nlos/cli/commands.hpp"
#include "nlos/cli/config.hpp"
#include "nlos/core/error.hpp"
#include "nlos/dataset/idx.hpp"
#include "nlos/render/nlss.hpp"

using namespace nlos;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "nlos_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Runs the nlos binary with `args`, capturing stdout and stderr together.
Run run_nlos(const std::string& args) {
  const fs::path log = scratch() / "last.log";
  const std::string cmd = std::string("\"") + NLOS_BINARY + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(log);
  return r;
}

fs::path small_scene() {
  const fs::path p = scratch() / "scene.json";
  std::ofstream(p) << R"({
  "wall": {"extent": [2.0, 2.0], "resolution": [32, 32]},
  "source_grid": {"rows": 5, "cols": 5, "fraction": 0.8},
  "materials": {"alpha_d": [0.8, 0.8, 0.8], "alpha_s": [0.3, 0.3, 0.3], "exponent": 20},
  "hidden": {"type": "plane", "plane": {"theta": 0.3, "phi": 0.5, "nu": 0.4}, "extent": [0.5, 0.5]}
})";
  return p;
}

}  // namespace

TEST_CASE("config rejects unknown keys by name") {
  const nlohmann::json doc = nlohmann::json::parse(R"({"render": {"samples": 100, "smaples": 5}})");
  try {
    config_from_json(doc);
    FAIL("no exception");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("smaples") != std::string::npos);
  }
}

TEST_CASE("config round-trips through JSON") {
  RunConfig c = config_from_json(nlohmann::json::parse(R"({"render": {"samples": 123}, "solver": {"tv": 0.5}})"));
  CHECK(c.simulate.samples == 123);
  CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
}

TEST_CASE("grid and renderer strings parse") {
  CHECK(parse_grid("5x5") == std::pair<int, int>{5, 5});
  CHECK(parse_grid("3x7") == std::pair<int, int>{3, 7});
  CHECK_THROWS_AS(parse_grid("5by5"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0x4"), ConfigError);
  CHECK(parse_renderer("oracle") == RendererKind::oracle);
  CHECK_THROWS_AS(parse_renderer("gpu"), ConfigError);
}

TEST_CASE("simulate writes one map per source") {
  const fs::path out = scratch() / "sim25.nlss";
  const Run r = run_nlos("simulate --scene \"" + small_scene().string() + "\" --grid 5x5 --samples 500 --out \"" +
                     out.string() + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const ReflectionStack s = read_nlss(out);
  s.validate();
  CHECK(s.size() == 25);
}

TEST_CASE("simulate with the oracle and a single source") {
  const fs::path out = scratch() / "sim1.nlss";
  const Run r = run_nlos("simulate --scene \"" + small_scene().string() + "\" --grid 1x1 --renderer oracle --out \"" +
                     out.string() + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(read_nlss(out).size() == 1);
}

TEST_CASE("simulate is deterministic for a fixed seed") {
  const fs::path a = scratch() / "det_a.nlss";
  const fs::path b = scratch() / "det_b.nlss";
  const std::string common = "simulate --scene \"" + small_scene().string() + "\" --grid 2x2 --samples 300 --seed 4 --out ";
  REQUIRE(run_nlos(common + "\"" + a.string() + "\"").code == 0);
  REQUIRE(run_nlos(common + "\"" + b.string() + "\"").code == 0);
  for (const auto& e : fs::directory_iterator(a)) {
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
}

TEST_CASE("invert reports a missing stack with exit code 1") {
  const std::string missing = (scratch() / "missing.nlss").string();
  const Run r = run_nlos("invert plane --in \"" + missing + "\"");
  CHECK(r.code == 1);
  CHECK(r.output.find(missing) != std::string::npos);
}

TEST_CASE("unknown config keys exit with code 1") {
  const fs::path cfg = scratch() / "bad.json";
  std::ofstream(cfg) << R"({"render": {"smaples": 5}})";
  const Run r = run_nlos("--config \"" + cfg.string() + "\" validate --scene \"" + small_scene().string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.output.find("smaples") != std::string::npos);
}

TEST_CASE("validate fails when the last sample count misses the threshold") {
  const Run r = run_nlos("validate --scene \"" + small_scene().string() + "\" --samples 10");
  CHECK(r.code == 4);
}

TEST_CASE("validate passes at a converged sample count and the oracle agrees with itself") {
  const Run r = run_nlos("validate --scene \"" + small_scene().string() + "\" --samples 100 10000 --oracle-check");
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(r.output.find("oracle") != std::string::npos);
}

TEST_CASE("dataset command writes the requested examples") {
  std::vector<ImageD> digits(2, ImageD(28, 28, 1));
  for (int k = 5; k < 23; ++k) digits[0](k, 14) = digits[1](14, k) = 1.0;
  const fs::path idx = scratch() / "digits.idx";
  const std::vector<std::uint8_t> bytes = encode_idx_images(digits);
  std::ofstream(idx, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                             static_cast<std::streamsize>(bytes.size()));
  const fs::path out = scratch() / "data";
  const Run r = run_nlos("dataset --mnist \"" + idx.string() + "\" --count 3 --samples 300 --out \"" + out.string() + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("count") == 3);
  for (int k = 0; k < 3; ++k) CHECK(fs::exists(out / ("example_00000" + std::to_string(k)) / "example.json"));
}

TEST_CASE("run_command maps error types to exit codes") {
  std::ostringstream err;
  CHECK(run_command([] { return kExitOk; }, err) == kExitOk);
  CHECK(run_command([]() -> int { throw ConfigError("bad key"); }, err) == kExitConfig);
  CHECK(run_command([]() -> int { throw RenderError("boom"); }, err) == kExitRender);
  CHECK(run_command([]() -> int { throw SolverError("stall"); }, err) == kExitSolver);
  CHECK(run_command([]() -> int { throw EmptyTracks("none"); }, err) == kExitSolver);
  CHECK(err.str().find("stall") != std::string::npos);
}
