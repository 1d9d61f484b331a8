#pragma once

#include <iosfwd>

namespace tiara::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitTheoremFailed = 3;
inline constexpr int kExitIo = 4;

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tiara::cli
