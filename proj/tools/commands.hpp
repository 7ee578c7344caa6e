#pragma once

// Subcommands of the gpwave batch front-end. Each returns a process exit
// status: 0 success, 2 usage or invalid input, 3 non-convergence or a
// failed verification, 4 I/O failure.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace gpwave::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNotConverged = 3, kIo = 4 };

struct SolitonArgs {
  std::optional<double> c;
  std::optional<double> p;
  int samples = 201;
  double xmax = 10.0;
  std::optional<std::filesystem::path> out;
};

struct RunArgs {
  std::filesystem::path config;
  std::optional<std::filesystem::path> seed;
  std::optional<std::filesystem::path> out;  ///< overrides the config's out
  int jobs = 1;
};

struct VerifyArgs {
  bool fast = false;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> curve;
  std::optional<std::filesystem::path> out;
  int jobs = 1;
};

int cmd_soliton(const SolitonArgs& args, std::ostream& out, std::ostream& err);
int cmd_minimize(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_critical_length(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv with CLI11 and dispatches.
int run(int argc, char** argv);

}  // namespace gpwave::cli
