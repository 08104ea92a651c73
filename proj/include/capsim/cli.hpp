#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "capsim/release.hpp"

namespace capsim {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_validation = 2, exit_runtime = 3 };

/// Runs one subcommand: simulate, validate, fit, sweep or oracle.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Minimal SVG line chart of released mass against time. Throws std::invalid_argument when empty.
std::string release_svg(const ReleaseRecord& record);

}  // namespace capsim
