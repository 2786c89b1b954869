#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hetwig::cli {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "HETWIG_OUTPUT_DIR";

/// Runs one command line (without the program name). Returns 0 on success,
/// 2 for flag errors (reported before any computation), 1 for computation or
/// I/O failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetwig::cli
