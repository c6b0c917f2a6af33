#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oscispline {

/// Exit codes of the command-line front end.
enum ExitCode { kExitOk = 0, kExitValidation = 1, kExitNoConvergence = 2 };

/// Runs one subcommand. args excludes the program name. Output files named
/// with --out are written directly; "-" (the default) goes to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace oscispline
