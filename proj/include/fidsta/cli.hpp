#pragma once

#include <string>
#include <vector>

namespace fidsta {

// Full command-line entry point, callable in-process (tests drive it without
// spawning). args excludes the program name. Returns the process exit code:
// 0 success, 2 input parse error, 3 numeric/estimation failure, 4 config error.
int fidsta_main(const std::vector<std::string>& args);

} // namespace fidsta
