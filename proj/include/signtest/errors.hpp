#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace signtest {

enum class ErrorKind {
  kZeroEntry,
  kInvalidSpec,
  kTooLarge,
  kOrderTooLarge,
  kNonFiniteEvaluation,
  kInvalidR,
  kInvalidRho,
  kInvalidSigma,
  kInvalidArgument,
};

const char* to_string(ErrorKind kind);

// Single exception type for every domain error raised by the library. The
// kind lets callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), kind_(kind), index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Offending element, when the error refers to one (e.g. a zero entry).
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace signtest
