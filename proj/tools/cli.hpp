#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lsboost::cli {

/// Runs one CLI invocation. Exit codes: 0 success, 2 usage, 3 data, 4 oracle/contract.
/// Errors are reported on `err` as a single JSON line {"error": kind, "message": text}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsboost::cli
