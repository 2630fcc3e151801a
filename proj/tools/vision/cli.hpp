/**
 * @file cli.hpp
 * @brief `vision` command dispatch
 *
 * Exit codes: 0 success, 1 operational failure (including a REJECTED ingest
 * or a failed verify), 2 usage error.
 */

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vision::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

/// `args` excludes the program name.
[[nodiscard]] auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int;

}  // namespace vision::cli
