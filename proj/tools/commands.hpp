#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace mudiv::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitCheckFailed = 3;

struct CommandResult {
  std::string text;
  std::vector<std::string> failed_checks;  // empty when consistent
  std::vector<std::string> warnings;
};

/// 12 significant digits (%.12g), independent of the process locale.
std::string format_number(double v);

CommandResult cmd_optimize(const RunConfig& cfg, OutputFormat fmt);
CommandResult cmd_sweep_k(const RunConfig& cfg, OutputFormat fmt);
CommandResult cmd_approx_gap(const RunConfig& cfg, OutputFormat fmt);
CommandResult cmd_scaling(const RunConfig& cfg, OutputFormat fmt);
CommandResult cmd_simulate(const RunConfig& cfg, OutputFormat fmt);

/// Full command line entry point; `out` receives the result unless --output
/// is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mudiv::cli
