#pragma once

#include <string>
#include <vector>

namespace sievelab {

// Dispatches the sievelab subcommands.  Returns 0 on success, 1 on domain or
// resource errors, 2 on usage errors.  Diagnostics go to the error stream.
int run_cli(const std::vector<std::string>& args);

}  // namespace sievelab
