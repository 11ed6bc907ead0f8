#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "olxp/metrics.h"

namespace olxp {

// L = lambda * W. Errors: kValidation when lambda < 0 or W <= 0.
double LittlesLawL(double lambda_per_s, double mean_latency_s);

struct LockSampleCounts {
  double lock_samples = 0;   // LS
  double total_samples = 0;  // TS
  double baseline_overhead = 0;  // BLO, a fraction in (0, 1]
};

// LS / (TS * BLO) * 100. Errors: kValidation on broken invariants.
double NormalizedLockOverhead(const LockSampleCounts& counts);

// One "LS TS BLO" triple per line; blank lines and '#' comments skipped.
// Errors: kValidation naming the line.
std::vector<LockSampleCounts> ParseLockCounts(std::string_view text);

struct InterferenceReport {
  double latency_inflation = 1;       // treated mean / baseline mean
  double tail_inflation = 1;          // treated p95 / baseline p95
  double throughput_degradation = 0;  // 1 - treated tput / baseline tput
  std::vector<double> normalized_latency;  // mean latency / baseline mean, per pressure level
};

// Errors: kValidation when the baseline has zero throughput or either side
// lacks latency statistics.
InterferenceReport Interference(const ClassReport& baseline, const ClassReport& treated);

// Same, for one class of two runs of the same benchmark.
InterferenceReport Interference(const RunReport& baseline, const RunReport& treated,
                                WorkloadClass cls);

std::string InterferenceToJson(const InterferenceReport& report);

// Sweep curve against the first report as baseline. One CSV row per report:
// axis value, committed count, throughput, mean and p95 latency, normalized
// mean latency, tail inflation, throughput degradation. The axis value is
// read from the report tag named `axis`.
std::string SweepCsv(std::string_view axis, const std::vector<RunReport>& reports,
                     WorkloadClass cls);

}  // namespace olxp
