#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bscope::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

// Runs one command line (args[0] is the program name). Diagnostics go to
// `err`, summaries to `out`. Returns 0 iff no error was reported.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bscope::cli
