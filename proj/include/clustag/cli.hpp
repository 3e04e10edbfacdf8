#pragma once

#include <string>
#include <vector>

namespace clustag {

// Entry point behind the clustag binary; also callable from tests.
// argv excludes the program name. Returns the process exit status.
int run_cli(const std::vector<std::string>& argv);

}  // namespace clustag
