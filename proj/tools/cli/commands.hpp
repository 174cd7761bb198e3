#pragma once

#include <iosfwd>

namespace ecfsfdp::cli {

/// Entry point of the ecfsfdp tool. Normal output goes to `out`, summaries and
/// diagnostics to `err`. Returns the process exit code: 0 on success, 1 on a
/// data or parameter error, 2 on a usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecfsfdp::cli
