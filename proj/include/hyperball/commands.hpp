#pragma once

#include <iosfwd>

namespace hyperball::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

// Entry point of the `hyperball` tool: gen-data, train, eval, analyze,
// export-map.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyperball::cli
