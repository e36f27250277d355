#pragma once

#include <string>
#include <vector>

namespace matwalk {

// command line front end; returns the process exit code:
//   0 success / verification passed
//   1 verification failed
//   2 invalid input (bad flags, malformed specs, domain errors)
//   3 resource budget exceeded
int run(int argc, const char* const* argv);

// convenience overload, args exclude the program name
int run(const std::vector<std::string>& args);

}  // namespace matwalk
