#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stator {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1; // I/O and other non-numerical failures
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

/// Environment variable overriding the output directory of the config file
/// (a --out flag still wins).
inline constexpr const char* output_dir_env = "STATOR_OUTPUT_DIR";

/// Entry point of the `stator` binary; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace stator
