#pragma once

#include <string>
#include <vector>

namespace harmflow::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kNumericalError = 3,
};

// Runs the harmflow command line; args excludes the program name.
int run(const std::vector<std::string>& args);

// HARMFLOW_THREADS, clamped to >= 1. Unset or malformed means 1.
unsigned thread_cap_from_env();

}  // namespace harmflow::cli
