#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace quantone::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kRuntime = 4,
  kExhausted = 5,
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace quantone::cli
