#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kocycle::cli {

/// Runs the command-line tool in-process. Exit codes: 0 success,
/// 1 validation or guard failure, 2 parse error (files or flags),
/// 3 search failure, 4 enumeration budget truncation.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace kocycle::cli
