#pragma once

#include <iosfwd>

namespace gfm::cli {

/// Exit status: 0 success, 1 runtime error, 2 usage error. Errors are
/// reported on `err` as a single line "error: <Category>: <message>".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gfm::cli
