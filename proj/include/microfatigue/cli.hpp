#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace microfatigue {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitRuntime = 3,
};

/// Entry point behind the `microfatigue` executable. args[0] is the program
/// name, as in argv.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace microfatigue
