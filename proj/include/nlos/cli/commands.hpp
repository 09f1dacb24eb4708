#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include "nlos/cli/config.hpp"

namespace nlos {

/// Process exit codes shared by every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,      ///< configuration, input or I/O failure
  kExitRender = 2,
  kExitSolver = 3,
  kExitValidation = 4,
};

struct SimulateArgs {
  std::filesystem::path scene;
  std::filesystem::path out;
};

struct InvertArgs {
  std::string mode;  ///< "plane" or "albedo"
  std::filesystem::path in;
  std::filesystem::path plane;  ///< optional PlaneEstimate JSON for albedo mode
  std::filesystem::path out;
};

struct ValidateArgs {
  std::filesystem::path scene;
};

struct DatasetArgs {
  std::filesystem::path out;
};

int cmd_simulate(const RunConfig& config, const SimulateArgs& args, std::ostream& out);
int cmd_invert(const RunConfig& config, const InvertArgs& args, std::ostream& out);
int cmd_validate(const RunConfig& config, const ValidateArgs& args, std::ostream& out);
int cmd_dataset(const RunConfig& config, const DatasetArgs& args, std::ostream& out);

/// Run `body`, mapping library exceptions to exit codes with the message on `err`.
int run_command(const std::function<int()>& body, std::ostream& err);

}  // namespace nlos
