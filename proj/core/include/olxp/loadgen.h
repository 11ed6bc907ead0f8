#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olxp/benchspec.h"
#include "olxp/driver.h"
#include "olxp/metrics.h"

namespace olxp {

// sequential: one class at a time; concurrent: OLTP and OLAP agents side by
// side; hybrid: hybrid transactions only.
enum class RunMode { kSequential, kConcurrent, kHybrid };
enum class LoopKind { kOpen, kClosed };
enum class Jitter { kFixed, kPoisson };

std::string_view ModeName(RunMode mode);
std::string_view LoopName(LoopKind loop);
std::string_view JitterName(Jitter jitter);
std::optional<RunMode> ParseMode(std::string_view name);
std::optional<LoopKind> ParseLoop(std::string_view name);
std::optional<Jitter> ParseJitter(std::string_view name);

struct RunConfig {
  std::string benchmark = "subenchmark";
  RunMode mode = RunMode::kConcurrent;
  LoopKind loop = LoopKind::kOpen;
  double oltp_rate = 0;  // requests per second
  double olap_rate = 0;
  double hybrid_rate = 0;
  int terminals = 0;  // closed loop, split across active classes
  double warmup_s = 60;
  double duration_s = 240;
  uint64_t seed = 1;
  int64_t scale = 50;
  std::map<std::string, int64_t> weights;  // per-template override of the default mix
  BackendTarget target;
  Jitter jitter = Jitter::kFixed;
  size_t queue_capacity = 10000;  // per class
  double grace_s = 5;

  double horizon_s() const { return warmup_s + duration_s; }
  double RateOf(WorkloadClass cls) const;
  // Classes with a nonzero rate, in oltp, olap, olxp order.
  std::vector<WorkloadClass> ActiveClasses() const;
};

// Throws kValidation naming the offending field.
void ValidateRunConfig(const RunConfig& config);

// The default mix for `cls`, or only the templates of that class named in
// config.weights when any are named. Throws kValidation for a weight naming
// no template of the catalog or an all-zero mix.
Mix EffectiveMix(const RunConfig& config, const BenchmarkCatalog& catalog, WorkloadClass cls);

// Send times relative to run start, nondecreasing, all in [0, horizon).
struct SendSchedule {
  std::vector<double> times;
};

// fixed: exact 1/rate spacing from t = 0. poisson: exponential interarrivals
// with mean 1/rate. Throws kValidation when rate <= 0 or horizon <= 0.
SendSchedule ScheduleOpenLoop(double rate, double horizon_s, Jitter jitter, uint64_t seed);

// Open-loop requests for one class, fixed before the run starts.
struct PlannedRequest {
  double send_time = 0;
  size_t template_index = 0;  // into EffectiveMix(...).entries()
};

struct ClassPlan {
  WorkloadClass cls = WorkloadClass::kOnline;
  Mix mix;
  std::vector<PlannedRequest> requests;
};

// The full open-loop plan: a pure function of config and catalog.
std::vector<ClassPlan> PlanOpenLoop(const RunConfig& config, const BenchmarkCatalog& catalog);

// Request `index` of class `cls`: template pick and bindings from a stream
// derived from (seed, cls, index).
BoundTransaction MakeRequest(const BenchmarkCatalog& catalog, const Mix& mix, WorkloadClass cls,
                             uint64_t seed, uint64_t index, int64_t scale);

struct DispatchRecord {
  WorkloadClass cls = WorkloadClass::kOnline;
  std::string template_name;
  bool read_only = false;
  double scheduled = 0;  // seconds from phase start
  double actual = 0;
  bool dropped = false;  // queue full
};

struct DispatchAccuracy {
  size_t sends = 0;
  double achieved_rate = 0;      // sends actually made before the horizon / horizon
  double within_1ms = 0;         // fraction of sends within +-1 ms of schedule
  double max_abs_error_s = 0;
};

DispatchAccuracy MeasureDispatch(const std::vector<DispatchRecord>& records, WorkloadClass cls,
                                 double horizon_s);

struct RunResult {
  RunReport report;
  std::vector<LatencySample> samples;
  std::vector<DispatchRecord> dispatch;  // open loop only
  int max_in_flight = 0;
  std::map<std::string, int64_t> errors;  // first line of each failure message, counted
  int64_t timed_out = 0;  // queued requests abandoned at horizon + grace
};

// Drives the workload against `pool`. The schema must exist and be populated.
// Throws kValidation on configuration conflicts; backend saturation is
// reported through latency, queue drops and abort counts rather than errors.
RunResult Run(const RunConfig& config, const BenchmarkCatalog& catalog, Pool& pool);

// One run per value of `axis` ("oltp_rate" or "olap_rate"), everything else
// fixed. Reports carry the tag axis=value. Throws kValidation for an unknown
// axis or decreasing values.
std::vector<RunResult> Sweep(const RunConfig& base, std::string_view axis,
                             const std::vector<double>& values, const BenchmarkCatalog& catalog,
                             Pool& pool);

}  // namespace olxp
