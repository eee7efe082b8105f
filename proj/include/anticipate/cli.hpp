#pragma once

#include <iosfwd>

namespace anticipate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitBackend = 2;

/// Entry point behind the `anticipate` executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anticipate::cli
