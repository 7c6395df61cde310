#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mapn::cli {

enum ExitCode : int {
    kSuccess = 0,
    kEmptyResult = 1,
    kValidationFailure = 2,
    kUsageError = 3,
};

/// Runs one `mapn` invocation. argv[0] is the program name.
int runCli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace mapn::cli
