#include "olxp/analysis.h"

#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "olxp/error.h"

namespace olxp {
namespace {

void Require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCategory::kValidation, message);
}

const LatencyStats& LatencyOf(const ClassReport& r, const char* side) {
  Require(r.latency.has_value() && r.latency->mean_us > 0 && r.latency->p95_us > 0,
          fmt::format("{} {} report has no latency statistics", side, ClassName(r.cls)));
  return *r.latency;
}

}  // namespace

double LittlesLawL(double lambda_per_s, double mean_latency_s) {
  Require(std::isfinite(lambda_per_s) && lambda_per_s >= 0, "arrival rate must be >= 0");
  Require(std::isfinite(mean_latency_s) && mean_latency_s > 0, "mean latency must be > 0");
  return lambda_per_s * mean_latency_s;
}

double NormalizedLockOverhead(const LockSampleCounts& c) {
  Require(c.total_samples > 0, "total samples must be > 0");
  Require(c.baseline_overhead > 0 && c.baseline_overhead <= 1,
          "baseline overhead must lie in (0, 1]");
  Require(c.lock_samples >= 0 && c.lock_samples <= c.total_samples,
          "lock samples must lie in [0, total samples]");
  return c.lock_samples / (c.total_samples * c.baseline_overhead) * 100.0;
}

std::vector<LockSampleCounts> ParseLockCounts(std::string_view text) {
  std::vector<LockSampleCounts> out;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<double> values;
    for (double v; fields >> v;) values.push_back(v);
    const bool clean = fields.eof();
    if (clean && values.empty()) continue;
    Require(clean && values.size() == 3, fmt::format("line {}: expected LS TS BLO", lineno));
    LockSampleCounts c{values[0], values[1], values[2]};
    try {
      NormalizedLockOverhead(c);
    } catch (const Error& e) {
      throw Error(ErrorCategory::kValidation, fmt::format("line {}: {}", lineno, e.what()));
    }
    out.push_back(c);
  }
  return out;
}

InterferenceReport Interference(const ClassReport& baseline, const ClassReport& treated) {
  Require(baseline.cls == treated.cls, "interference compares different classes");
  Require(baseline.tput > 0, "baseline throughput is zero");
  const LatencyStats& b = LatencyOf(baseline, "baseline");
  const LatencyStats& t = LatencyOf(treated, "treated");
  InterferenceReport r;
  r.latency_inflation = t.mean_us / b.mean_us;
  r.tail_inflation = static_cast<double>(t.p95_us) / static_cast<double>(b.p95_us);
  r.throughput_degradation = 1.0 - treated.tput / baseline.tput;
  r.normalized_latency = {1.0, r.latency_inflation};
  return r;
}

InterferenceReport Interference(const RunReport& baseline, const RunReport& treated,
                                WorkloadClass cls) {
  Require(baseline.benchmark == treated.benchmark,
          fmt::format("benchmarks differ: {} vs {}", baseline.benchmark, treated.benchmark));
  const ClassReport* b = baseline.Find(cls);
  const ClassReport* t = treated.Find(cls);
  Require(b && t, fmt::format("class {} missing from a report", ClassName(cls)));
  return Interference(*b, *t);
}

std::string InterferenceToJson(const InterferenceReport& report) {
  nlohmann::json j = {{"latency_inflation", report.latency_inflation},
                      {"tail_inflation", report.tail_inflation},
                      {"throughput_degradation", report.throughput_degradation},
                      {"normalized_latency", report.normalized_latency}};
  return j.dump(2) + "\n";
}

std::string SweepCsv(std::string_view axis, const std::vector<RunReport>& reports,
                     WorkloadClass cls) {
  Require(!reports.empty(), "sweep has no reports");
  const ClassReport* base = reports.front().Find(cls);
  Require(base != nullptr, fmt::format("class {} missing from the baseline", ClassName(cls)));
  Require(base->tput > 0, "baseline throughput is zero");
  const LatencyStats& b = LatencyOf(*base, "baseline");

  std::string out = fmt::format(
      "{},count,tput,mean_us,p95_us,normalized_latency,tail_inflation,throughput_degradation\n",
      axis);
  for (const RunReport& r : reports) {
    Require(r.benchmark == reports.front().benchmark, "sweep mixes benchmarks");
    auto tag = r.tags.find(std::string(axis));
    std::string value = tag == r.tags.end() ? "" : tag->second;
    const ClassReport* c = r.Find(cls);
    Require(c != nullptr, fmt::format("class {} missing at {}={}", ClassName(cls), axis, value));
    const double degradation = 1.0 - c->tput / base->tput;
    if (c->latency) {
      out += fmt::format("{},{},{},{},{},{},{},{}\n", value, c->count, c->tput,
                         c->latency->mean_us, c->latency->p95_us,
                         c->latency->mean_us / b.mean_us,
                         static_cast<double>(c->latency->p95_us) / static_cast<double>(b.p95_us),
                         degradation);
    } else {
      out += fmt::format("{},{},{},,,,,{}\n", value, c->count, c->tput, degradation);
    }
  }
  return out;
}

}  // namespace olxp
