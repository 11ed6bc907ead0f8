#include "olxp/loadgen.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "olxp/error.h"

namespace olxp {
namespace {

using Clock = std::chrono::steady_clock;

constexpr WorkloadClass kClasses[] = {WorkloadClass::kOnline, WorkloadClass::kAnalytical,
                                      WorkloadClass::kHybrid};
constexpr size_t kMaxDistinctErrors = 32;

void Invalid(const std::string& message) { throw Error(ErrorCategory::kValidation, message); }

std::string_view RateField(WorkloadClass cls) {
  switch (cls) {
    case WorkloadClass::kOnline: return "oltp_rate";
    case WorkloadClass::kAnalytical: return "olap_rate";
    case WorkloadClass::kHybrid: return "hybrid_rate";
  }
  return "?";
}

uint64_t ClassTag(WorkloadClass cls) { return 0x636c6173ULL + static_cast<uint64_t>(cls); }

Clock::time_point At(Clock::time_point t0, double seconds) {
  return t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

double Since(Clock::time_point t0, Clock::time_point t) {
  return std::chrono::duration<double>(t - t0).count();
}

int64_t Micros(Clock::duration d) {
  return std::max<int64_t>(1, std::chrono::duration_cast<std::chrono::microseconds>(d).count());
}

std::string FirstLine(const std::string& s) { return s.substr(0, s.find('\n')); }

struct Request {
  size_t lane = 0;
  BoundTransaction txn;
  double scheduled = 0;
};

// Per-class bounded FIFOs. Workers take the request scheduled earliest
// across all lanes.
class Queues {
 public:
  Queues(size_t lanes, size_t capacity) : lanes_(lanes), capacity_(capacity) {}

  bool Push(Request r) {
    {
      std::lock_guard lock(mu_);
      auto& q = lanes_[r.lane];
      if (q.size() >= capacity_) return false;
      q.push_back(std::move(r));
    }
    cv_.notify_one();
    return true;
  }

  std::optional<Request> Pop(Clock::time_point deadline) {
    std::unique_lock lock(mu_);
    for (;;) {
      std::deque<Request>* best = nullptr;
      for (auto& q : lanes_) {
        if (!q.empty() && (!best || q.front().scheduled < best->front().scheduled)) best = &q;
      }
      if (best) {
        Request r = std::move(best->front());
        best->pop_front();
        return r;
      }
      if (closed_) return std::nullopt;
      if (cv_.wait_until(lock, deadline) == std::cv_status::timeout && Clock::now() >= deadline) {
        return std::nullopt;
      }
    }
  }

  void Close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  std::vector<Request> DrainAll() {
    std::lock_guard lock(mu_);
    std::vector<Request> out;
    for (auto& q : lanes_) {
      for (auto& r : q) out.push_back(std::move(r));
      q.clear();
    }
    return out;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::deque<Request>> lanes_;
  size_t capacity_;
  bool closed_ = false;
};

// State shared by the threads of one phase.
class Phase {
 public:
  Phase(const RunConfig& config, const BenchmarkCatalog& catalog, Pool& pool)
      : config_(config), catalog_(catalog), pool_(pool) {}

  std::vector<LatencySample> samples() const { return recorder_.Snapshot(); }
  std::vector<DispatchRecord>& dispatch() { return dispatch_; }
  int max_in_flight() const { return max_in_flight_.load(); }
  int64_t timed_out() const { return timed_out_; }
  const std::map<std::string, int64_t>& errors() const { return errors_; }

  // Mean of the 10 Hz in-flight samples taken inside the measurement window.
  std::optional<double> mean_in_flight() const {
    if (in_flight_samples_.empty()) return std::nullopt;
    double sum = 0;
    for (int v : in_flight_samples_) sum += v;
    return sum / static_cast<double>(in_flight_samples_.size());
  }

  void RunOpen(const std::vector<ClassPlan>& plans) {
    Queues queues(plans.size(), config_.queue_capacity);
    t0_ = Clock::now() + std::chrono::milliseconds(20);
    const auto deadline = At(t0_, config_.horizon_s() + config_.grace_s);

    std::vector<std::vector<DispatchRecord>> records(plans.size());
    std::vector<std::thread> workers;
    for (int w = 0; w < pool_.size(); ++w) {
      workers.emplace_back([&] { Work(queues, deadline); });
    }
    std::thread sampler([&] { Sample(); });
    std::vector<std::thread> dispatchers;
    for (size_t lane = 0; lane < plans.size(); ++lane) {
      dispatchers.emplace_back([&, lane] { Dispatch(plans[lane], lane, queues, records[lane]); });
    }
    for (auto& t : dispatchers) t.join();
    queues.Close();
    for (auto& t : workers) t.join();
    for (Request& r : queues.DrainAll()) {
      ++timed_out_;
      in_flight_.fetch_sub(1);
      recorder_.Record({r.txn.cls, r.txn.name, r.scheduled, 0, 0, SampleStatus::kDropped});
    }
    stop_sampler_.store(true);
    sampler.join();
    for (auto& lane : records) {
      dispatch_.insert(dispatch_.end(), std::make_move_iterator(lane.begin()),
                       std::make_move_iterator(lane.end()));
    }
  }

  void RunClosed(const std::vector<WorkloadClass>& classes) {
    const int per_class =
        std::max(1, config_.terminals / static_cast<int>(classes.size()));
    std::vector<Mix> mixes;
    for (WorkloadClass cls : classes) mixes.push_back(EffectiveMix(config_, catalog_, cls));
    t0_ = Clock::now() + std::chrono::milliseconds(20);
    const auto horizon = At(t0_, config_.horizon_s());

    std::thread sampler([&] { Sample(); });
    std::vector<std::thread> terminals;
    for (size_t k = 0; k < classes.size(); ++k) {
      for (int j = 0; j < per_class; ++j) {
        terminals.emplace_back([&, k, j] {
          const uint64_t stream = DeriveSeed(config_.seed, static_cast<uint64_t>(j) + 1);
          std::this_thread::sleep_until(t0_);
          for (uint64_t n = 0;; ++n) {
            BoundTransaction txn =
                MakeRequest(catalog_, mixes[k], classes[k], stream, n, config_.scale);
            const auto sent = Clock::now();
            if (sent >= horizon) break;
            Enter();
            Lease lease = pool_.Acquire();
            const auto start = Clock::now();
            ExecutionOutcome out = ExecuteTransaction(*lease, txn);
            const auto end = Clock::now();
            Finish(txn, out, Since(t0_, sent), Micros(end - sent), Micros(end - start));
          }
        });
      }
    }
    for (auto& t : terminals) t.join();
    stop_sampler_.store(true);
    sampler.join();
  }

 private:
  void Enter() {
    const int now = in_flight_.fetch_add(1) + 1;
    int seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }
  }

  void Finish(const BoundTransaction& txn, const ExecutionOutcome& out, double sent,
              int64_t latency_us, int64_t service_us) {
    in_flight_.fetch_sub(1);
    const bool ok = out.status == OutcomeStatus::kCommitted;
    recorder_.Record({txn.cls, txn.name, sent, latency_us, service_us,
                      ok ? SampleStatus::kCommitted : SampleStatus::kAborted});
    if (!ok) {
      std::lock_guard lock(errors_mu_);
      std::string key = fmt::format("{}: {}", txn.name, FirstLine(out.error));
      if (errors_.size() < kMaxDistinctErrors || errors_.count(key)) ++errors_[key];
    }
  }

  void Dispatch(const ClassPlan& plan, size_t lane, Queues& queues,
                std::vector<DispatchRecord>& records) {
    records.reserve(plan.requests.size());
    for (size_t i = 0; i < plan.requests.size(); ++i) {
      const PlannedRequest& p = plan.requests[i];
      Request r{lane, MakeRequest(catalog_, plan.mix, plan.cls, config_.seed, i, config_.scale),
                p.send_time};
      std::this_thread::sleep_until(At(t0_, p.send_time));
      const double actual = Since(t0_, Clock::now());
      DispatchRecord rec{plan.cls, r.txn.name, r.txn.read_only, p.send_time, actual, false};
      Enter();
      const std::string name = r.txn.name;
      if (!queues.Push(std::move(r))) {
        in_flight_.fetch_sub(1);
        rec.dropped = true;
        recorder_.Record({plan.cls, name, p.send_time, 0, 0, SampleStatus::kDropped});
      }
      records.push_back(std::move(rec));
    }
  }

  void Work(Queues& queues, Clock::time_point deadline) {
    Lease lease = pool_.Acquire();
    while (auto r = queues.Pop(deadline)) {
      const auto start = Clock::now();
      ExecutionOutcome out = ExecuteTransaction(*lease, r->txn);
      const auto end = Clock::now();
      Finish(r->txn, out, r->scheduled, Micros(end - At(t0_, r->scheduled)),
             Micros(end - start));
    }
  }

  // One sample at a random instant of every 100 ms slot, so the sampler
  // cannot lock onto the phase of a fixed send schedule.
  void Sample() {
    Rng rng(DeriveSeed(config_.seed, 0x73616d70ULL));
    std::this_thread::sleep_until(t0_);
    for (int64_t k = 0; !stop_sampler_.load(); ++k) {
      const double t = (static_cast<double>(k) + rng.UniformUnit()) * 0.1;
      if (t >= config_.horizon_s()) break;
      std::this_thread::sleep_until(At(t0_, t));
      if (t >= config_.warmup_s) in_flight_samples_.push_back(in_flight_.load());
    }
  }

  const RunConfig& config_;
  const BenchmarkCatalog& catalog_;
  Pool& pool_;
  Clock::time_point t0_;
  Recorder recorder_;
  std::vector<DispatchRecord> dispatch_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::atomic<bool> stop_sampler_{false};
  std::vector<int> in_flight_samples_;
  int64_t timed_out_ = 0;
  std::mutex errors_mu_;
  std::map<std::string, int64_t> errors_;
};

struct PhaseOutput {
  std::vector<LatencySample> samples;
  std::vector<DispatchRecord> dispatch;
  std::optional<double> mean_in_flight;
  int max_in_flight = 0;
  int64_t timed_out = 0;
  std::map<std::string, int64_t> errors;
};

PhaseOutput RunPhase(const RunConfig& config, const BenchmarkCatalog& catalog, Pool& pool) {
  Phase phase(config, catalog, pool);
  if (config.loop == LoopKind::kOpen) {
    phase.RunOpen(PlanOpenLoop(config, catalog));
  } else {
    phase.RunClosed(config.ActiveClasses());
  }
  return {phase.samples(), std::move(phase.dispatch()), phase.mean_in_flight(),
          phase.max_in_flight(), phase.timed_out(), phase.errors()};
}

void SetRate(RunConfig& config, WorkloadClass cls, double rate) {
  switch (cls) {
    case WorkloadClass::kOnline: config.oltp_rate = rate; break;
    case WorkloadClass::kAnalytical: config.olap_rate = rate; break;
    case WorkloadClass::kHybrid: config.hybrid_rate = rate; break;
  }
}

}  // namespace

std::string_view ModeName(RunMode mode) {
  switch (mode) {
    case RunMode::kSequential: return "sequential";
    case RunMode::kConcurrent: return "concurrent";
    case RunMode::kHybrid: return "hybrid";
  }
  return "?";
}

std::string_view LoopName(LoopKind loop) { return loop == LoopKind::kOpen ? "open" : "closed"; }

std::string_view JitterName(Jitter jitter) {
  return jitter == Jitter::kFixed ? "fixed" : "poisson";
}

std::optional<RunMode> ParseMode(std::string_view name) {
  for (RunMode m : {RunMode::kSequential, RunMode::kConcurrent, RunMode::kHybrid}) {
    if (ModeName(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<LoopKind> ParseLoop(std::string_view name) {
  if (name == "open") return LoopKind::kOpen;
  if (name == "closed") return LoopKind::kClosed;
  return std::nullopt;
}

std::optional<Jitter> ParseJitter(std::string_view name) {
  if (name == "fixed") return Jitter::kFixed;
  if (name == "poisson") return Jitter::kPoisson;
  return std::nullopt;
}

double RunConfig::RateOf(WorkloadClass cls) const {
  switch (cls) {
    case WorkloadClass::kOnline: return oltp_rate;
    case WorkloadClass::kAnalytical: return olap_rate;
    case WorkloadClass::kHybrid: return hybrid_rate;
  }
  return 0;
}

std::vector<WorkloadClass> RunConfig::ActiveClasses() const {
  std::vector<WorkloadClass> out;
  for (WorkloadClass cls : kClasses) {
    if (RateOf(cls) > 0) out.push_back(cls);
  }
  return out;
}

void ValidateRunConfig(const RunConfig& c) {
  for (WorkloadClass cls : kClasses) {
    const double r = c.RateOf(cls);
    if (!std::isfinite(r) || r < 0) Invalid(fmt::format("{} must be >= 0", RateField(cls)));
  }
  if (!std::isfinite(c.duration_s) || c.duration_s <= 0) Invalid("duration must be > 0");
  if (!std::isfinite(c.warmup_s) || c.warmup_s < 0) Invalid("warmup must be >= 0");
  if (!std::isfinite(c.grace_s) || c.grace_s < 0) Invalid("grace must be >= 0");
  if (c.scale < 1) Invalid("scale must be >= 1");
  if (c.queue_capacity < 1) Invalid("queue capacity must be >= 1");
  if (c.target.pool_size < 1) Invalid("pool size must be >= 1");
  if (c.mode == RunMode::kHybrid) {
    if (c.oltp_rate > 0) Invalid("hybrid mode takes hybrid_rate only, but oltp_rate > 0");
    if (c.olap_rate > 0) Invalid("hybrid mode takes hybrid_rate only, but olap_rate > 0");
    if (c.hybrid_rate <= 0) Invalid("hybrid mode needs hybrid_rate > 0");
  } else {
    if (c.hybrid_rate > 0) {
      Invalid(fmt::format("{} mode does not take hybrid_rate", ModeName(c.mode)));
    }
    if (c.oltp_rate <= 0 && c.olap_rate <= 0) {
      Invalid(fmt::format("{} mode needs oltp_rate or olap_rate > 0", ModeName(c.mode)));
    }
  }
  if (c.loop == LoopKind::kClosed && c.terminals < 1) Invalid("closed loop needs terminals >= 1");
}

Mix EffectiveMix(const RunConfig& config, const BenchmarkCatalog& catalog, WorkloadClass cls) {
  for (const auto& [name, weight] : config.weights) {
    if (!catalog.FindTransaction(name) && !catalog.FindHybrid(name)) {
      Invalid(fmt::format("weight names unknown template {}", name));
    }
    if (weight < 0) Invalid(fmt::format("negative weight for {}", name));
  }
  std::vector<MixEntry> entries = DefaultMix(catalog, cls).entries();
  const bool overridden = std::any_of(entries.begin(), entries.end(), [&](const MixEntry& e) {
    return config.weights.count(e.name) > 0;
  });
  if (overridden) {
    for (auto& e : entries) {
      auto it = config.weights.find(e.name);
      e.weight = it == config.weights.end() ? 0 : it->second;
    }
  }
  Mix mix(std::move(entries));
  if (mix.empty()) Invalid(fmt::format("{} mix has zero total weight", ClassName(cls)));
  return mix;
}

SendSchedule ScheduleOpenLoop(double rate, double horizon_s, Jitter jitter, uint64_t seed) {
  if (!(rate > 0) || !std::isfinite(rate)) Invalid("rate must be > 0");
  if (!(horizon_s > 0) || !std::isfinite(horizon_s)) Invalid("horizon must be > 0");
  SendSchedule s;
  if (jitter == Jitter::kFixed) {
    s.times.reserve(static_cast<size_t>(std::ceil(rate * horizon_s)));
    for (int64_t i = 0;; ++i) {
      const double t = static_cast<double>(i) / rate;
      if (t >= horizon_s) break;
      s.times.push_back(t);
    }
  } else {
    Rng rng(seed);
    double t = 0;
    for (;;) {
      t += -std::log1p(-rng.UniformUnit()) / rate;
      if (t >= horizon_s) break;
      s.times.push_back(t);
    }
  }
  return s;
}

BoundTransaction MakeRequest(const BenchmarkCatalog& catalog, const Mix& mix, WorkloadClass cls,
                             uint64_t seed, uint64_t index, int64_t scale) {
  Rng rng(DeriveSeed(seed, ClassTag(cls), index));
  const std::string& name = mix.entries()[mix.Pick(rng)].name;
  if (cls == WorkloadClass::kHybrid) return Instantiate(catalog, *catalog.FindHybrid(name), rng, scale);
  return Instantiate(catalog, *catalog.FindTransaction(name), rng, scale);
}

std::vector<ClassPlan> PlanOpenLoop(const RunConfig& config, const BenchmarkCatalog& catalog) {
  ValidateRunConfig(config);
  std::vector<ClassPlan> plans;
  for (WorkloadClass cls : config.ActiveClasses()) {
    ClassPlan plan{cls, EffectiveMix(config, catalog, cls), {}};
    SendSchedule s = ScheduleOpenLoop(config.RateOf(cls), config.horizon_s(), config.jitter,
                                      DeriveSeed(config.seed, ClassTag(cls), ~0ULL));
    plan.requests.reserve(s.times.size());
    for (size_t i = 0; i < s.times.size(); ++i) {
      Rng rng(DeriveSeed(config.seed, ClassTag(cls), i));
      plan.requests.push_back({s.times[i], plan.mix.Pick(rng)});
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

DispatchAccuracy MeasureDispatch(const std::vector<DispatchRecord>& records, WorkloadClass cls,
                                 double horizon_s) {
  DispatchAccuracy a;
  size_t within = 0, on_time = 0;
  for (const auto& r : records) {
    if (r.cls != cls) continue;
    ++a.sends;
    if (r.actual < horizon_s) ++on_time;
    const double err = std::abs(r.actual - r.scheduled);
    if (err <= 1e-3) ++within;
    a.max_abs_error_s = std::max(a.max_abs_error_s, err);
  }
  if (a.sends > 0) {
    a.achieved_rate = static_cast<double>(on_time) / horizon_s;
    a.within_1ms = static_cast<double>(within) / static_cast<double>(a.sends);
  }
  return a;
}

RunResult Run(const RunConfig& config, const BenchmarkCatalog& catalog, Pool& pool) {
  ValidateRunConfig(config);
  const std::vector<WorkloadClass> classes = config.ActiveClasses();
  for (WorkloadClass cls : classes) EffectiveMix(config, catalog, cls);

  RunResult result;
  RunReport& report = result.report;
  std::vector<double> in_flight;  // per phase

  auto absorb = [&](PhaseOutput&& out) {
    result.samples.insert(result.samples.end(), out.samples.begin(), out.samples.end());
    result.dispatch.insert(result.dispatch.end(), std::make_move_iterator(out.dispatch.begin()),
                           std::make_move_iterator(out.dispatch.end()));
    result.max_in_flight = std::max(result.max_in_flight, out.max_in_flight);
    result.timed_out += out.timed_out;
    for (const auto& [k, v] : out.errors) result.errors[k] += v;
    if (out.mean_in_flight) in_flight.push_back(*out.mean_in_flight);
  };

  if (config.mode == RunMode::kSequential) {
    for (WorkloadClass cls : classes) {
      RunConfig single = config;
      for (WorkloadClass other : kClasses) {
        if (other != cls) SetRate(single, other, 0);
      }
      PhaseOutput out = RunPhase(single, catalog, pool);
      RunReport part = Summarize(out.samples, config.warmup_s, config.duration_s, {cls});
      report.classes.push_back(part.classes.front());
      absorb(std::move(out));
    }
  } else {
    PhaseOutput out = RunPhase(config, catalog, pool);
    report = Summarize(out.samples, config.warmup_s, config.duration_s, classes);
    absorb(std::move(out));
  }

  report.benchmark = catalog.name;
  report.mode = std::string(ModeName(config.mode));
  report.warmup_s = config.warmup_s;
  report.duration_s = config.duration_s;
  if (!in_flight.empty()) {
    report.mean_in_flight = std::accumulate(in_flight.begin(), in_flight.end(), 0.0) /
                            static_cast<double>(in_flight.size());
  }
  report.tags["loop"] = std::string(LoopName(config.loop));
  report.tags["seed"] = std::to_string(config.seed);
  report.tags["scale"] = std::to_string(config.scale);
  if (config.loop == LoopKind::kOpen) {
    report.tags["jitter"] = std::string(JitterName(config.jitter));
  } else {
    report.tags["terminals"] = std::to_string(config.terminals);
  }
  for (WorkloadClass cls : kClasses) {
    report.tags[std::string(RateField(cls))] = fmt::format("{}", config.RateOf(cls));
  }
  return result;
}

std::vector<RunResult> Sweep(const RunConfig& base, std::string_view axis,
                             const std::vector<double>& values, const BenchmarkCatalog& catalog,
                             Pool& pool) {
  if (axis != "oltp_rate" && axis != "olap_rate") {
    Invalid(fmt::format("sweep axis must be oltp_rate or olap_rate, got {}", axis));
  }
  if (!std::is_sorted(values.begin(), values.end())) Invalid("sweep values must be nondecreasing");
  std::vector<RunResult> out;
  for (double v : values) {
    RunConfig c = base;
    (axis == "oltp_rate" ? c.oltp_rate : c.olap_rate) = v;
    RunResult r = Run(c, catalog, pool);
    r.report.tags[std::string(axis)] = fmt::format("{}", v);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace olxp
