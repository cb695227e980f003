#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcov::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInvalid = 1;     // datum, parameters or arguments rejected
inline constexpr int kAssertion = 2;   // an invariant check failed
inline constexpr int kUsage = 64;
inline constexpr int kIo = 74;

// Runs one command line (args excludes the program name). Results go to `out`
// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Worker cap: QPI_THREADS if set and positive, else the hardware concurrency.
int thread_cap();

}  // namespace qcov::cli
