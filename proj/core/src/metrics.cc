#include "olxp/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "olxp/error.h"

namespace olxp {
namespace {

using nlohmann::json;

constexpr WorkloadClass kClassOrder[] = {WorkloadClass::kOnline, WorkloadClass::kAnalytical,
                                         WorkloadClass::kHybrid};

json StatsJson(const std::optional<LatencyStats>& s) {
  if (!s) return nullptr;
  return {{"min_us", s->min_us},   {"p50_us", s->p50_us},     {"p90_us", s->p90_us},
          {"p95_us", s->p95_us},   {"p999_us", s->p999_us},   {"p9999_us", s->p9999_us},
          {"max_us", s->max_us},   {"mean_us", s->mean_us}};
}

std::optional<LatencyStats> StatsFromJson(const json& j) {
  if (j.is_null()) return std::nullopt;
  LatencyStats s;
  s.min_us = j.at("min_us").get<int64_t>();
  s.p50_us = j.at("p50_us").get<int64_t>();
  s.p90_us = j.at("p90_us").get<int64_t>();
  s.p95_us = j.at("p95_us").get<int64_t>();
  s.p999_us = j.at("p999_us").get<int64_t>();
  s.p9999_us = j.at("p9999_us").get<int64_t>();
  s.max_us = j.at("max_us").get<int64_t>();
  s.mean_us = j.at("mean_us").get<double>();
  return s;
}

}  // namespace

std::string_view StatusName(SampleStatus status) {
  switch (status) {
    case SampleStatus::kCommitted: return "committed";
    case SampleStatus::kAborted: return "aborted";
    case SampleStatus::kDropped: return "dropped";
  }
  return "?";
}

void Recorder::Record(LatencySample sample) {
  Shard& shard = shards_[std::hash<std::thread::id>{}(std::this_thread::get_id()) % kShards];
  std::lock_guard lock(shard.mu);
  shard.samples.push_back(std::move(sample));
}

std::vector<LatencySample> Recorder::Snapshot() const {
  std::vector<LatencySample> out;
  for (const auto& shard : shards_) {
    std::lock_guard lock(shard.mu);
    out.insert(out.end(), shard.samples.begin(), shard.samples.end());
  }
  return out;
}

size_t Recorder::size() const {
  size_t n = 0;
  for (const auto& shard : shards_) {
    std::lock_guard lock(shard.mu);
    n += shard.samples.size();
  }
  return n;
}

size_t NearestRank(double p, size_t n) {
  // The epsilon absorbs binary rounding in p * n (0.9 * 100 is 90.000...01).
  const double raw = std::ceil(p * static_cast<double>(n) - 1e-9);
  return std::clamp<size_t>(raw < 1 ? 1 : static_cast<size_t>(raw), 1, n);
}

int64_t Percentile(std::vector<int64_t> samples, double p) {
  if (samples.empty()) {
    throw Error(ErrorCategory::kUndefinedStatistic, "percentile of an empty sample set");
  }
  if (!(p > 0 && p <= 1)) {
    throw Error(ErrorCategory::kValidation, fmt::format("percentile {} outside (0, 1]", p));
  }
  const size_t k = NearestRank(p, samples.size()) - 1;
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k),
                   samples.end());
  return samples[k];
}

bool LatencyStats::Ordered() const {
  return min_us <= p50_us && p50_us <= p90_us && p90_us <= p95_us && p95_us <= p999_us &&
         p999_us <= p9999_us && p9999_us <= max_us && min_us <= mean_us && mean_us <= max_us;
}

LatencyStats ComputeStats(std::vector<int64_t> v) {
  if (v.empty()) throw Error(ErrorCategory::kUndefinedStatistic, "no samples");
  std::sort(v.begin(), v.end());
  auto at = [&](double p) { return v[NearestRank(p, v.size()) - 1]; };
  LatencyStats s;
  s.min_us = v.front();
  s.max_us = v.back();
  s.p50_us = at(0.5);
  s.p90_us = at(0.9);
  s.p95_us = at(0.95);
  s.p999_us = at(0.999);
  s.p9999_us = at(0.9999);
  long double sum = 0;
  for (int64_t x : v) sum += x;
  s.mean_us = static_cast<double>(sum / static_cast<long double>(v.size()));
  s.mean_us = std::clamp(s.mean_us, static_cast<double>(s.min_us), static_cast<double>(s.max_us));
  return s;
}

const ClassReport* RunReport::Find(WorkloadClass cls) const {
  for (const auto& c : classes) {
    if (c.cls == cls) return &c;
  }
  return nullptr;
}

const ClassAggregate* AggregateReport::Find(WorkloadClass cls) const {
  for (const auto& c : classes) {
    if (c.cls == cls) return &c;
  }
  return nullptr;
}

RunReport Summarize(const std::vector<LatencySample>& samples, double warmup, double duration,
                    std::vector<WorkloadClass> classes) {
  if (!(duration > 0)) {
    throw Error(ErrorCategory::kValidation, "summary window must have positive duration");
  }
  RunReport report;
  report.warmup_s = warmup;
  report.duration_s = duration;
  const double end = warmup + duration;
  if (classes.empty()) {
    for (const auto& s : samples) {
      if (std::find(classes.begin(), classes.end(), s.cls) == classes.end()) {
        classes.push_back(s.cls);
      }
    }
  }
  const auto windows = static_cast<size_t>(std::ceil(duration - 1e-9));
  for (WorkloadClass cls : kClassOrder) {
    if (std::find(classes.begin(), classes.end(), cls) == classes.end()) continue;
    ClassReport r;
    r.cls = cls;
    r.throughput_series.assign(windows, 0);
    std::vector<int64_t> latency, service;
    for (const auto& s : samples) {
      if (s.cls != cls || s.send_time < warmup || s.send_time >= end) continue;
      switch (s.status) {
        case SampleStatus::kCommitted: {
          ++r.count;
          latency.push_back(s.latency_us);
          service.push_back(s.service_us);
          ++r.committed_by_template[s.template_name];
          const auto w = static_cast<size_t>(s.send_time - warmup);
          ++r.throughput_series[std::min(w, windows - 1)];
          break;
        }
        case SampleStatus::kAborted: ++r.aborted; break;
        case SampleStatus::kDropped: ++r.dropped; break;
      }
    }
    r.tput = static_cast<double>(r.count) / duration;
    const int64_t attempted = r.count + r.aborted;
    r.abort_rate = attempted > 0 ? static_cast<double>(r.aborted) / attempted : 0;
    const int64_t offered = attempted + r.dropped;
    r.drop_rate = offered > 0 ? static_cast<double>(r.dropped) / offered : 0;
    if (!latency.empty()) {
      r.latency = ComputeStats(std::move(latency));
      r.service = ComputeStats(std::move(service));
    }
    report.classes.push_back(std::move(r));
  }
  return report;
}

const std::vector<std::string>& ReportFieldNames() {
  static const std::vector<std::string> names = {
      "count",   "tput",     "min_us", "p50_us",  "p90_us",     "p95_us",
      "p999_us", "p9999_us", "max_us", "mean_us", "abort_rate", "drop_rate"};
  return names;
}

std::map<std::string, double> ReportFields(const ClassReport& r) {
  std::map<std::string, double> f = {{"count", static_cast<double>(r.count)},
                                     {"tput", r.tput},
                                     {"abort_rate", r.abort_rate},
                                     {"drop_rate", r.drop_rate}};
  if (r.latency) {
    const auto& s = *r.latency;
    f["min_us"] = static_cast<double>(s.min_us);
    f["p50_us"] = static_cast<double>(s.p50_us);
    f["p90_us"] = static_cast<double>(s.p90_us);
    f["p95_us"] = static_cast<double>(s.p95_us);
    f["p999_us"] = static_cast<double>(s.p999_us);
    f["p9999_us"] = static_cast<double>(s.p9999_us);
    f["max_us"] = static_cast<double>(s.max_us);
    f["mean_us"] = s.mean_us;
  }
  return f;
}

AggregateReport AggregateRuns(const std::vector<RunReport>& reports) {
  if (reports.empty()) throw Error(ErrorCategory::kValidation, "no reports to aggregate");
  const RunReport& first = reports.front();
  for (size_t i = 1; i < reports.size(); ++i) {
    const auto& r = reports[i];
    bool same = r.classes.size() == first.classes.size();
    for (size_t c = 0; same && c < r.classes.size(); ++c) {
      same = r.classes[c].cls == first.classes[c].cls &&
             r.classes[c].latency.has_value() == first.classes[c].latency.has_value();
    }
    if (!same) {
      throw Error(ErrorCategory::kValidation,
                  fmt::format("report {} has a different shape from report 0", i));
    }
  }

  AggregateReport out;
  out.runs = reports.size();
  for (size_t c = 0; c < first.classes.size(); ++c) {
    ClassAggregate agg;
    agg.cls = first.classes[c].cls;
    std::map<std::string, std::vector<double>> values;
    for (const auto& r : reports) {
      for (const auto& [k, v] : ReportFields(r.classes[c])) values[k].push_back(v);
    }
    for (const auto& [k, v] : values) {
      StatSummary s;
      s.n = v.size();
      s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(s.n);
      if (s.n > 1) {
        double ss = 0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
      }
      agg.stats[k] = s;
    }
    out.classes.push_back(std::move(agg));
  }
  return out;
}

std::string ReportToJson(const RunReport& report) {
  json classes = json::array();
  for (const auto& c : report.classes) {
    json rec = {{"class", std::string(ClassName(c.cls))}};
    for (const auto& name : ReportFieldNames()) rec[name] = nullptr;
    for (const auto& [k, v] : ReportFields(c)) rec[k] = v;
    rec["count"] = c.count;
    for (const char* k : {"min_us", "p50_us", "p90_us", "p95_us", "p999_us", "p9999_us",
                          "max_us"}) {
      if (!rec[k].is_null()) rec[k] = static_cast<int64_t>(rec[k].get<double>());
    }
    rec["aborted"] = c.aborted;
    rec["dropped"] = c.dropped;
    rec["service"] = StatsJson(c.service);
    rec["throughput_series"] = c.throughput_series;
    rec["templates"] = c.committed_by_template;
    classes.push_back(std::move(rec));
  }
  json doc = {{"benchmark", report.benchmark},
              {"mode", report.mode},
              {"warmup_s", report.warmup_s},
              {"duration_s", report.duration_s},
              {"tags", report.tags},
              {"mean_in_flight", report.mean_in_flight ? json(*report.mean_in_flight) : json()},
              {"classes", std::move(classes)}};
  return doc.dump(2) + "\n";
}

RunReport ReportFromJson(std::string_view text) {
  try {
    const json doc = json::parse(text);
    RunReport r;
    r.benchmark = doc.at("benchmark").get<std::string>();
    r.mode = doc.at("mode").get<std::string>();
    r.warmup_s = doc.at("warmup_s").get<double>();
    r.duration_s = doc.at("duration_s").get<double>();
    r.tags = doc.value("tags", std::map<std::string, std::string>{});
    if (doc.contains("mean_in_flight") && !doc["mean_in_flight"].is_null()) {
      r.mean_in_flight = doc["mean_in_flight"].get<double>();
    }
    for (const auto& rec : doc.at("classes")) {
      ClassReport c;
      const auto cls = ParseClassName(rec.at("class").get<std::string>());
      if (!cls) throw Error(ErrorCategory::kValidation, "unknown class in report");
      c.cls = *cls;
      c.count = rec.at("count").get<int64_t>();
      c.tput = rec.at("tput").get<double>();
      c.abort_rate = rec.at("abort_rate").get<double>();
      c.drop_rate = rec.at("drop_rate").get<double>();
      c.aborted = rec.value("aborted", int64_t{0});
      c.dropped = rec.value("dropped", int64_t{0});
      if (!rec.at("p50_us").is_null()) c.latency = StatsFromJson(rec);
      if (rec.contains("service")) c.service = StatsFromJson(rec["service"]);
      c.throughput_series = rec.value("throughput_series", std::vector<int64_t>{});
      c.committed_by_template = rec.value("templates", std::map<std::string, int64_t>{});
      r.classes.push_back(std::move(c));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kValidation, fmt::format("malformed report: {}", e.what()));
  }
}

std::string ReportToText(const RunReport& report) {
  std::string out = fmt::format("{} ({} mode), window {:g} s after {:g} s warm-up\n",
                                report.benchmark, report.mode, report.duration_s, report.warmup_s);
  for (const auto& [k, v] : report.tags) out += fmt::format("  {} = {}\n", k, v);
  out += fmt::format("{:<6}{:>9}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>12}{:>8}{:>8}\n",
                     "class", "count", "tput", "min_us", "p50_us", "p90_us", "p95_us", "p999_us",
                     "p9999_us", "max_us", "mean_us", "abort", "drop");
  for (const auto& c : report.classes) {
    auto cell = [&](int64_t LatencyStats::*field) {
      return c.latency ? fmt::format("{}", (*c.latency).*field) : std::string("-");
    };
    out += fmt::format(
        "{:<6}{:>9}{:>10.2f}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>12}{:>8.4f}{:>8.4f}\n",
        ClassName(c.cls), c.count, c.tput, cell(&LatencyStats::min_us),
        cell(&LatencyStats::p50_us), cell(&LatencyStats::p90_us), cell(&LatencyStats::p95_us),
        cell(&LatencyStats::p999_us), cell(&LatencyStats::p9999_us), cell(&LatencyStats::max_us),
        c.latency ? fmt::format("{:.1f}", c.latency->mean_us) : std::string("-"), c.abort_rate,
        c.drop_rate);
  }
  if (report.mean_in_flight) {
    out += fmt::format("mean in-flight requests: {:.2f}\n", *report.mean_in_flight);
  }
  return out;
}

std::string AggregateToJson(const AggregateReport& aggregate) {
  json classes = json::array();
  for (const auto& c : aggregate.classes) {
    json stats = json::object();
    for (const auto& [k, s] : c.stats) stats[k] = {{"mean", s.mean}, {"stddev", s.stddev}};
    classes.push_back({{"class", std::string(ClassName(c.cls))}, {"stats", std::move(stats)}});
  }
  return json{{"runs", aggregate.runs}, {"classes", std::move(classes)}}.dump(2) + "\n";
}

std::string AggregateToText(const AggregateReport& aggregate) {
  std::string out = fmt::format("{} runs\n", aggregate.runs);
  for (const auto& c : aggregate.classes) {
    out += fmt::format("{}\n", ClassName(c.cls));
    for (const auto& name : ReportFieldNames()) {
      auto it = c.stats.find(name);
      if (it == c.stats.end()) continue;
      out += fmt::format("  {:<12}{:>16.3f} ± {:.3f}\n", name, it->second.mean, it->second.stddev);
    }
  }
  return out;
}

}  // namespace olxp
