#pragma once

#include <iosfwd>

namespace evonet::cli {

enum ExitCode : int {
    kSuccess = 0,
    kRuntimeFailure = 1,
    kUsageError = 2,
    kNoCutoff = 3,
};

/// Entry point behind the `evonet` executable; subcommands bench, estimate and query.
/// Progress and warnings go to err, tables and summaries to out.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace evonet::cli
