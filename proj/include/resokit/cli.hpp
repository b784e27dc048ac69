#pragma once

#include "resokit/error.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace resokit::cli {

/// Process exit codes. These are stable and documented in the README.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParseError = 2,      ///< unparseable input file, bad JSON schema, bad grid
  kExtractionError = 3, ///< extraction or design failure
  kIoError = 4,
  kNotConverged = 5,    ///< fit result written but flagged
};

int exit_code_for(ErrorKind kind);

/// Runs one command line (without the program name). Data goes to `out` only
/// when an output path is "-"; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace resokit::cli
