#pragma once

namespace nipaths::cli {

// Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 failed verdict.
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_verdict = 4;

int run(int argc, char** argv);

}  // namespace nipaths::cli
