#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vlk::cli {

/// Parses arguments and runs one subcommand. Returns 0 on success, 2 on a
/// usage error and 1 on a data error (message on err).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vlk::cli
