#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coopsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

/// Entry point of the `coopsim` command; `args` excludes the program name.
/// Subcommands: run, sweep, adaptive, oracle, analyze, baselines.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coopsim
