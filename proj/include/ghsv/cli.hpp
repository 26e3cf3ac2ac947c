#pragma once
#include <string>
#include <vector>

namespace ghsv::cli {

// Batch entry point: subcommands simulate / fit / predict / validate.
// Exit codes: 0 ok, 1 validation-suite failure, 2 usage or config error,
// 3 numerical failure during execution. Errors go to standard error.
int run(int argc, const char* const* argv);

// same, for in-process callers and tests; args exclude the program name
int run(const std::vector<std::string>& args);

}  // namespace ghsv::cli
