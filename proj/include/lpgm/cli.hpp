#pragma once

// Command-line front end. Subcommands: constants, rate-curve, clt, ldp,
// surface-vs-cone. Settings come from flags, optionally layered over a
// key=value config file (--config); flags win. A CSV file written by this
// tool is itself a valid config file: its "# config.<key>=<value>" header
// lines are read back, so `--config previous.csv` replays a run.

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpgm::cli {

inline constexpr const char* kToolName = "lpgm";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitIo = 3,
  kExitInternal = 4,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads key=value lines. Blank lines and '#' comments are skipped, except
/// "# config.<key>=<value>" lines, which are read as <key>=<value>. Reading
/// stops at the first line that is neither (e.g. a CSV header row). Keys
/// are normalized to lower case with '_' replaced by '-'.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Runs the tool with argv-style arguments (without the program name).
/// Data goes to --out when given, otherwise to `out`; diagnostics go to
/// `err`. Returns one of the ExitCode values.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lpgm::cli
