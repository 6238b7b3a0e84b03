#pragma once

namespace kernsel::cli {

// Entry point behind the command-line tool. Returns 0 on success, 1 on a
// usage error, 2 on a runtime error.
int run(int argc, const char* const* argv);

} // namespace kernsel::cli
