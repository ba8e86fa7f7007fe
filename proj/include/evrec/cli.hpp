#pragma once

namespace evrec::cli {

// Runs the command-line front end. Exit codes: 0 success, 2 bad usage,
// 3 runtime failure (with an `error: ...` line on stderr).
int run(int argc, const char* const* argv);

}  // namespace evrec::cli
