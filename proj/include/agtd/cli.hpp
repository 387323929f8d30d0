#pragma once

#include <string>
#include <vector>

namespace agtd {

/// Runs one CLI invocation. Returns 0 on success, 1 on usage errors,
/// 2 on data errors. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args);

std::string tool_version();

}  // namespace agtd
