#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace agdo::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,  // build failures, tolerance breaches
    kUsage = 2,        // bad flags or configuration
    kDataError = 3,    // unreadable, malformed or inconsistent documents
};

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace agdo::cli
