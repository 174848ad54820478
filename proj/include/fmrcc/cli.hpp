#pragma once

#include <string>
#include <vector>

namespace fmrcc::cli {

// Entry point shared by the binary and the tests. Returns the process
// exit code: 0 iff all requested outputs were written.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace fmrcc::cli
