#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace svshrink {

/// Entry point behind the `svshrink` executable. `args` excludes the program
/// name. Returns the process exit code; failures print a JSON error object
/// ({"error", "kind", and "row"/"column" for CSV problems}) on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace svshrink
