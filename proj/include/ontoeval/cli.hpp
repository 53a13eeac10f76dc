#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ontoeval::cli {

enum ExitCode { kOk = 0, kAuditFailed = 1, kInputError = 2, kBackendError = 3 };

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ontoeval::cli
