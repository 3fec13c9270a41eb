#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sct::cli {

/// Exit codes of dispatch.
enum Exit : int { Accept = 0, Reject = 1, Usage = 2 };

/// Runs one `sct` invocation. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sct::cli
