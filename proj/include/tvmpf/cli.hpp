#pragma once

#include <string>

namespace tvmpf {

/// Library version string (matches the CMake project version).
std::string version();

/// Entry point of the `tvmpf` tool. Returns 0 on success, 1 on a runtime
/// failure (one-line diagnostic on stderr) and 2 on a usage error.
int run_cli(int argc, const char* const* argv);

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "TVMPF_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "tvmpf_out";

}  // namespace tvmpf
