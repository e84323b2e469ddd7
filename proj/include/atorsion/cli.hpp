#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace atorsion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitInput = 2;

// args excludes the program name. Reports go to `out` (or --out), diagnostics
// to `err`. Returns 0 when every assertion passed, 1 on an assertion failure,
// 2 on malformed input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace atorsion::cli
