#pragma once

#include <iosfwd>

namespace smoothchol {

inline constexpr const char* kVersion = "0.1.0";

// Runs the `sc` command line. Returns 0 on success, 1 on usage, I/O or
// dimension errors and 2 on numerical failures; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smoothchol
