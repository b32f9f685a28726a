#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace coupled::cli {

enum ExitCode : int { success = 0, failure = 1, usage = 2 };

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics and progress to `err`. Serve mode reads framed requests
/// from standard input when --stdio is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coupled::cli
