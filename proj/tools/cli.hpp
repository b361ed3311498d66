#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chowla::cli {

/// Runs one `chowla` subcommand. Returns 0 on success, 2 on usage errors and
/// 1 on computational errors. Output goes to `out` unless --output is given,
/// in which case the file is written atomically and a one-line summary is
/// printed to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

} // namespace chowla::cli
