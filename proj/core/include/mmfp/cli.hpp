#pragma once

#include <string>
#include <vector>

namespace mmfp {

// Full command-line surface. args excludes argv[0]. Returns the process
// exit code; errors print one line to stderr and return nonzero.
int run_cli(const std::vector<std::string>& args);

int cli_main(int argc, char** argv);

} // namespace mmfp
