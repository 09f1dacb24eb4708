#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "nlos/cli/commands.hpp"
#include "nlos/core/error.hpp"

namespace {

/// Flag values that override the loaded config only when given.
struct Overrides {
  std::optional<int> samples;
  std::optional<std::string> grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> noise;
  std::optional<std::string> renderer;
  std::optional<double> beta;
  std::optional<double> tv;
  std::optional<int> iters;
  std::optional<std::vector<int>> sample_list;
  std::optional<std::string> mnist;
  std::optional<std::size_t> count;
  std::optional<int> threads;
  bool png = false;
  bool no_tilt = false;
  bool oracle_check = false;
};

void apply(const Overrides& o, nlos::RunConfig& c) {
  if (o.samples) c.simulate.samples = c.dataset.samples = *o.samples;
  if (o.grid) {
    std::tie(c.simulate.grid_rows, c.simulate.grid_cols) = nlos::parse_grid(*o.grid);
    c.simulate.grid_from_scene = false;
  }
  if (o.seed) c.simulate.seed = c.dataset.seed = *o.seed;
  if (o.noise) {
    if (*o.noise != "on" && *o.noise != "off") throw nlos::ConfigError("--noise must be on or off");
    c.simulate.noise = *o.noise == "on";
  }
  if (o.renderer) c.simulate.renderer = nlos::parse_renderer(*o.renderer);
  if (o.beta) c.inversion.beta = *o.beta;
  if (o.tv) c.inversion.admm.lambda = *o.tv;
  if (o.iters) c.inversion.admm.max_iterations = *o.iters;
  if (o.sample_list) c.validate.samples = *o.sample_list;
  if (o.mnist) c.dataset.mnist = *o.mnist;
  if (o.count) c.dataset.count = *o.count;
  if (o.threads) c.render.threads = c.dataset.threads = *o.threads;
  if (o.png) c.simulate.png = true;
  if (o.no_tilt) c.inversion.resolve_tilt = false;
  if (o.oracle_check) c.validate.oracle_reference_check = true;
  c.check();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state non-line-of-sight simulation and planar inversion"};
  app.require_subcommand(1);
  std::string config_file;
  std::string workdir;
  bool dump_config = false;
  app.add_option("--config", config_file, "JSON run configuration");
  app.add_option("--workdir", workdir, "root for every relative path (default: config value or .)");
  app.add_flag("--dump-config", dump_config, "print the effective configuration as JSON before running");

  Overrides o;
  nlos::SimulateArgs sim_args;
  nlos::InvertArgs inv_args;
  nlos::ValidateArgs val_args;
  nlos::DatasetArgs data_args;

  auto* sim = app.add_subcommand("simulate", "render a reflection stack (.nlss directory) from a scene file");
  sim->add_option("--scene", sim_args.scene, "scene JSON")->required();
  sim->add_option("--out", sim_args.out, "output .nlss directory")->required();
  sim->add_option("--samples", o.samples, "hemisphere samples for the fast renderer");
  sim->add_option("--grid", o.grid, "source grid RxC (default: scene sources, else 5x5)");
  sim->add_option("--seed", o.seed, "noise seed");
  sim->add_option("--noise", o.noise, "on|off");
  sim->add_option("--renderer", o.renderer, "fast|oracle");
  sim->add_option("--threads", o.threads, "render threads, 0 = all cores");
  sim->add_flag("--png", o.png, "also write 16-bit PNG previews of every map");

  auto* inv = app.add_subcommand("invert", "recover the plane or the specular albedo chart from a stack");
  inv->add_option("mode", inv_args.mode, "plane|albedo")->required()->check(CLI::IsMember({"plane", "albedo"}));
  inv->add_option("--in", inv_args.in, "input .nlss directory")->required();
  inv->add_option("--plane", inv_args.plane, "plane estimate JSON (albedo mode; estimated when absent)");
  inv->add_option("--beta", o.beta, "specular blur width of the forward model");
  inv->add_option("--tv", o.tv, "total-variation weight");
  inv->add_option("--iters", o.iters, "ADMM iterations");
  inv->add_flag("--no-tilt", o.no_tilt, "skip the photometric tilt search");
  inv->add_option("--out", inv_args.out, "plane JSON, or chart stem for <stem>.png/.f32/.json");

  auto* val = app.add_subcommand("validate", "compare the fast renderer against the surface-integral oracle");
  val->add_option("--scene", val_args.scene, "scene JSON")->required();
  val->add_option("--samples", o.sample_list, "sample counts, e.g. --samples 25 100 10000")->expected(1, -1);
  val->add_flag("--oracle-check", o.oracle_check, "also report oracle against itself");
  val->add_option("--threads", o.threads, "render threads, 0 = all cores");

  auto* data = app.add_subcommand("dataset", "generate the planar digit training set");
  data->add_option("--mnist", o.mnist, "IDX image file");
  data->add_option("--count", o.count, "number of examples (recipe: 20000)");
  data->add_option("--out", data_args.out, "output directory")->required();
  data->add_option("--seed", o.seed, "sampler seed");
  data->add_option("--samples", o.samples, "hemisphere samples per map");
  data->add_option("--threads", o.threads, "examples rendered in parallel, 0 = all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nlos::kExitConfig;
  }

  nlos::RunConfig config;
  const int setup = nlos::run_command(
      [&] {
        if (!config_file.empty()) config = nlos::load_config(config_file);
        if (!workdir.empty()) config.workdir = workdir;
        apply(o, config);
        if (dump_config) std::cout << nlos::config_to_json(config).dump(2) << "\n";
        return 0;
      },
      std::cerr);
  if (setup != 0) return setup;

  return nlos::run_command(
      [&] {
        if (sim->parsed()) return nlos::cmd_simulate(config, sim_args, std::cout);
        if (inv->parsed()) return nlos::cmd_invert(config, inv_args, std::cout);
        if (val->parsed()) return nlos::cmd_validate(config, val_args, std::cout);
        return nlos::cmd_dataset(config, data_args, std::cout);
      },
      std::cerr);
}
