#pragma once

// Command-line surface: test, power, size, mc, figure, quadcheck,
// identities. Every command writes CSV (canonical, versioned in the first
// comment line) or JSON (with a config echo) and is deterministic given its
// flags.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace signtest::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitParse = 4,
  kExitZeroEntry = 5,
  kExitDomain = 6,
  kExitCheckFailed = 7,
};

// Environment variable naming the directory used when --output is absent.
inline constexpr const char* kOutputDirEnv = "SIGNTEST_OUTPUT_DIR";

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Observations {
  std::vector<double> values;
  // 1-based source line of each value.
  std::vector<int> lines;
};

// Whitespace/newline-delimited numbers, or a single-column CSV whose first
// line may be a header. Blank lines and lines starting with '#' are
// skipped. Throws ParseError naming the source and line.
Observations parse_observations(std::istream& in, const std::string& source);

// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

// "1,2,5..8" -> {1, 2, 5, 6, 7, 8}. Throws ParseError.
std::vector<int> parse_int_list(const std::string& text);
// "0.1,0.5" -> {0.1, 0.5}. Throws ParseError.
std::vector<double> parse_real_list(const std::string& text);

// Runs one invocation; argv[0] is the program name. Reports go to out (or
// the chosen file), diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace signtest::cli
