#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace olxp {

enum class ErrorCategory {
  kValidation,
  kUnknownBenchmark,
  kUnorderableSchema,
  kUndefinedStatistic,
  kConfig,
  kBackendUnavailable,
  kUnsupportedIsolation,
  kBackend,
  kLoad,
  kPrecondition,
  kIo,
};

// Stable, machine-parseable name used by the CLI ("error[<name>]: ...").
std::string_view CategoryName(ErrorCategory category);

// Process exit code for a category; never 0.
int ExitCode(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace olxp
