#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bandsel {

// Entry point behind the `bandsel` executable. `args` excludes the program
// name. Returns the process exit code: 0 on success, 1 on a runtime failure,
// 2 on a usage error. Diagnostics go to `err` as a single line.
//
//   bandsel select|evaluate|compare|synth --config <file> [--seed u64] [--out dir]
//   bandsel inspect (--cube <file> [--format f] | --config <file>)
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bandsel
