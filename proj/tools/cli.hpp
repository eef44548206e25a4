#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hcb::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one command line (without the program name). Returns 0 on success,
/// 1 when a verification fails and 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hcb::cli
