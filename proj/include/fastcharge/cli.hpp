#pragma once

#include <iosfwd>

namespace fastcharge {

/// Command-line entry point: simulate, map, train, evaluate, compare, plot.
/// Returns the process exit code; diagnostics go to err.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fastcharge
