#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geostat::cli {

/// Runs one `geostat` command line (args excludes the program name). Returns
/// the process exit code: 0 on success, 1 on any error (reported on `err`),
/// 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geostat::cli
