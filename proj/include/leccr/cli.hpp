#pragma once

#include <string>
#include <vector>

namespace leccr {

// Entry point shared by the leccr binary and in-process tests.
// Exit codes: 0 success, 2 usage, 3 config, 4 numeric failure,
// 5 data/file errors, 1 anything else.
int run_cli(const std::vector<std::string>& args);

}  // namespace leccr
