// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pagezip
{

enum ExitCode : int
{
    ExitOk = 0,
    ExitFailure = 1,  // unexpected internal error
    ExitInput = 2,    // bad config, flags or input files
    ExitEndpoint = 3, // a model, judge or OCR endpoint failed (outputs are still flushed)
};

/// Runs `pagezip <args...>` in-process: args excludes the program name.
/// Normal output goes to `out`, diagnostics to `err`.
[[nodiscard]] int runCli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

} // namespace pagezip
