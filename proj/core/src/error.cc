#include "olxp/error.h"

namespace olxp {

std::string_view CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kUnknownBenchmark: return "unknown-benchmark";
    case ErrorCategory::kUnorderableSchema: return "unorderable-schema";
    case ErrorCategory::kUndefinedStatistic: return "undefined-statistic";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kBackendUnavailable: return "backend-unavailable";
    case ErrorCategory::kUnsupportedIsolation: return "unsupported-isolation";
    case ErrorCategory::kBackend: return "backend";
    case ErrorCategory::kLoad: return "load";
    case ErrorCategory::kPrecondition: return "precondition";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

int ExitCode(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kValidation: return 2;
    case ErrorCategory::kUnknownBenchmark: return 3;
    case ErrorCategory::kUnorderableSchema: return 4;
    case ErrorCategory::kUndefinedStatistic: return 5;
    case ErrorCategory::kConfig: return 6;
    case ErrorCategory::kBackendUnavailable: return 7;
    case ErrorCategory::kUnsupportedIsolation: return 8;
    case ErrorCategory::kBackend: return 9;
    case ErrorCategory::kLoad: return 10;
    case ErrorCategory::kPrecondition: return 11;
    case ErrorCategory::kIo: return 12;
  }
  return 1;
}

}  // namespace olxp
