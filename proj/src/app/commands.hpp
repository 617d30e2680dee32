#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace ssvep::app {

/// Runs the ssvep command line. args[0] is the program name. Returns the exit
/// code; diagnostics go to `err`, human summaries to `out`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace ssvep::app
