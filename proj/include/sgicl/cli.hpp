#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sgicl {

/// Entry point behind the `sgicl` executable. `args` excludes the program
/// name. Returns 0 on success, 1 on a pipeline error and 2 on a
/// configuration error; errors print one `error: <kind>: <message>` line to
/// `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace sgicl
