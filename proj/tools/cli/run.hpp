#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace migtk::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

std::string_view version();

// Validates, runs the subcommand and writes manifest.txt (always, once the
// configuration is valid) plus timings.txt into the output directory.
// An invalid configuration or a missing input writes nothing.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Command-line front end: flags override --config entries, which override
// the defaults.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace migtk::cli
