#pragma once

#include <string>
#include <vector>

namespace psl {

// Entry point behind the `psl` binary; exposed so tests can drive the
// commands in-process. Exit codes: 0 ok, 1 usage, 2 data error,
// 3 numerical failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace psl
