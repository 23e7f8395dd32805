// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mlproc::cli {

enum class ExitStatus : int {
    success = 0, // holds, conforming, reachable, written
    failure = 1, // fails, non-conforming, unreachable, ill-formed
    error = 2,   // usage, parse or I/O error
};

/// Runs one command. `args` excludes the program name. The report goes to
/// `out` and ends with a `VERDICT: <word>` line; diagnostics go to `err`.
[[nodiscard]] int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mlproc::cli
