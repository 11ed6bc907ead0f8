#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olxp/benchspec.h"

namespace olxp {

enum class SampleStatus { kCommitted, kAborted, kDropped };

std::string_view StatusName(SampleStatus status);

struct LatencySample {
  WorkloadClass cls = WorkloadClass::kOnline;
  std::string template_name;
  double send_time = 0;     // seconds from phase start
  int64_t latency_us = 0;   // scheduled send to commit ack
  int64_t service_us = 0;   // queue exit to commit ack
  SampleStatus status = SampleStatus::kCommitted;
};

// Multi-producer sample sink. Appends from different threads land in
// separate shards, so recording rarely contends.
class Recorder {
 public:
  void Record(LatencySample sample);
  std::vector<LatencySample> Snapshot() const;  // call after producers quiesce
  size_t size() const;

 private:
  static constexpr size_t kShards = 16;
  struct Shard {
    mutable std::mutex mu;
    std::vector<LatencySample> samples;
  };
  std::array<Shard, kShards> shards_;
};

// Nearest rank: the value at 1-based rank ceil(p * n) of the sorted multiset.
// Errors: kUndefinedStatistic for an empty multiset, kValidation for p
// outside (0, 1].
int64_t Percentile(std::vector<int64_t> samples, double p);

// Rank used by Percentile, clamped to [1, n].
size_t NearestRank(double p, size_t n);

struct LatencyStats {
  int64_t min_us = 0;
  int64_t p50_us = 0;
  int64_t p90_us = 0;
  int64_t p95_us = 0;
  int64_t p999_us = 0;
  int64_t p9999_us = 0;
  int64_t max_us = 0;
  double mean_us = 0;

  bool Ordered() const;
};

// Throws kUndefinedStatistic when empty.
LatencyStats ComputeStats(std::vector<int64_t> latencies_us);

struct ClassReport {
  WorkloadClass cls = WorkloadClass::kOnline;
  int64_t count = 0;  // committed in window
  int64_t aborted = 0;
  int64_t dropped = 0;
  double tput = 0;        // count / window seconds
  double abort_rate = 0;  // aborted / (committed + aborted)
  double drop_rate = 0;   // dropped / (committed + aborted + dropped)
  std::optional<LatencyStats> latency;  // send to commit; absent when count == 0
  std::optional<LatencyStats> service;  // queue exit to commit
  std::vector<int64_t> throughput_series;  // commits per 1 s window of send time
  std::map<std::string, int64_t> committed_by_template;
};

struct RunReport {
  std::string benchmark;
  std::string mode;
  double warmup_s = 0;
  double duration_s = 0;
  std::vector<ClassReport> classes;  // ordered oltp, olap, olxp
  std::optional<double> mean_in_flight;
  std::map<std::string, std::string> tags;  // e.g. sweep axis and value

  const ClassReport* Find(WorkloadClass cls) const;
};

// Statistics over samples whose send_time lies in [warmup, warmup + duration).
// Classes listed in `classes` always appear; otherwise those seen in samples.
RunReport Summarize(const std::vector<LatencySample>& samples, double warmup, double duration,
                    std::vector<WorkloadClass> classes = {});

// Per-statistic sample mean and standard deviation (n - 1 denominator; 0 for
// a single report). Keys are the report field names.
struct StatSummary {
  double mean = 0;
  double stddev = 0;
  size_t n = 0;
};

struct ClassAggregate {
  WorkloadClass cls = WorkloadClass::kOnline;
  std::map<std::string, StatSummary> stats;
};

struct AggregateReport {
  std::vector<ClassAggregate> classes;
  size_t runs = 0;

  const ClassAggregate* Find(WorkloadClass cls) const;
};

// Errors: kValidation for an empty list or reports of different shape.
AggregateReport AggregateRuns(const std::vector<RunReport>& reports);

// Field values of one class record under the fixed names (count, tput,
// min_us, p50_us, p90_us, p95_us, p999_us, p9999_us, max_us, mean_us,
// abort_rate, drop_rate). Latency fields are missing when absent.
std::map<std::string, double> ReportFields(const ClassReport& report);
const std::vector<std::string>& ReportFieldNames();

std::string ReportToJson(const RunReport& report);
RunReport ReportFromJson(std::string_view json);  // kValidation on malformed input
std::string ReportToText(const RunReport& report);
std::string AggregateToJson(const AggregateReport& aggregate);
std::string AggregateToText(const AggregateReport& aggregate);

}  // namespace olxp
