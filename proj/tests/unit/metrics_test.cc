#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <thread>

#include "olxp/error.h"
#include "olxp/metrics.h"

using namespace olxp;

namespace {

// Oracle: full sort, rank computed in integer arithmetic for p = num / den.
int64_t OraclePercentile(std::vector<int64_t> v, int64_t num, int64_t den) {
  std::sort(v.begin(), v.end());
  const int64_t n = static_cast<int64_t>(v.size());
  int64_t rank = (num * n + den - 1) / den;
  rank = std::max<int64_t>(1, std::min(rank, n));
  return v[static_cast<size_t>(rank - 1)];
}

LatencySample Committed(double t, int64_t us, WorkloadClass cls = WorkloadClass::kOnline) {
  return {cls, "T", t, us, us, SampleStatus::kCommitted};
}

ErrorCategory CategoryOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("expected an olxp::Error");
  return ErrorCategory::kIo;
}

}  // namespace

TEST_CASE("percentile examples") {
  for (double p : {0.01, 0.5, 0.9999, 1.0}) CHECK(Percentile({7}, p) == 7);
  std::vector<int64_t> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 1);
  std::shuffle(hundred.begin(), hundred.end(), std::mt19937(3));
  CHECK(Percentile(hundred, 0.90) == 90);
  CHECK(Percentile(hundred, 0.9999) == 100);
  CHECK(Percentile(hundred, 0.5) == 50);
  CHECK(Percentile(hundred, 0.001) == 1);
  CHECK(CategoryOf([] { Percentile({}, 0.5); }) == ErrorCategory::kUndefinedStatistic);
  CHECK(CategoryOf([] { Percentile({1}, 0.0); }) == ErrorCategory::kValidation);
  CHECK(CategoryOf([] { Percentile({1}, 1.5); }) == ErrorCategory::kValidation);
}

TEST_CASE("percentile agrees with the full-sort oracle") {
  std::mt19937_64 gen(2024);
  const std::pair<int64_t, int64_t> ps[] = {{1, 2},    {9, 10},    {19, 20},  {999, 1000},
                                            {9999, 10000}, {1, 3}, {1, 10000}, {1, 1},
                                            {37, 100}};
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = std::uniform_int_distribution<size_t>(1, trial < 20 ? 100000 : 2000)(gen);
    const int64_t hi = std::uniform_int_distribution<int64_t>(1, 1000000)(gen);
    std::vector<int64_t> v(n);
    for (auto& x : v) x = std::uniform_int_distribution<int64_t>(1, hi)(gen);
    for (auto [num, den] : ps) {
      CHECK(Percentile(v, static_cast<double>(num) / static_cast<double>(den)) ==
            OraclePercentile(v, num, den));
    }
  }
}

TEST_CASE("summarize") {
  SUBCASE("identical latencies collapse every statistic") {
    std::vector<LatencySample> s;
    for (int i = 0; i < 50; ++i) s.push_back(Committed(i * 0.1, 1234));
    auto r = Summarize(s, 0, 5);
    REQUIRE(r.classes.size() == 1);
    const auto& l = *r.classes[0].latency;
    for (int64_t v : {l.min_us, l.p50_us, l.p90_us, l.p95_us, l.p999_us, l.p9999_us, l.max_us}) {
      CHECK(v == 1234);
    }
    CHECK(l.mean_us == 1234.0);
  }
  SUBCASE("960 commits in a 240 s window is 4 per second") {
    std::vector<LatencySample> s;
    for (int i = 0; i < 960; ++i) s.push_back(Committed(60 + i * 0.25, 100 + i));
    auto r = Summarize(s, 60, 240);
    const auto& c = r.classes[0];
    CHECK(c.count == 960);
    CHECK(c.tput == doctest::Approx(4.0));
    CHECK(c.tput * 240 == doctest::Approx(static_cast<double>(c.count)));
    CHECK(c.throughput_series.size() == 240);
    CHECK(std::accumulate(c.throughput_series.begin(), c.throughput_series.end(), int64_t{0}) ==
          960);
    CHECK(c.latency->Ordered());
  }
  SUBCASE("warm-up and post-window samples are excluded") {
    std::vector<LatencySample> s = {Committed(0.5, 999999), Committed(59.999, 999999),
                                    Committed(60.0, 10), Committed(70, 20),
                                    Committed(80.0, 999999)};
    auto r = Summarize(s, 60, 20);
    CHECK(r.classes[0].count == 2);
    CHECK(r.classes[0].latency->max_us == 20);
  }
  SUBCASE("arrival order does not matter") {
    std::mt19937 gen(9);
    std::vector<LatencySample> s;
    for (int i = 0; i < 1000; ++i) {
      s.push_back(Committed(std::uniform_real_distribution<double>(0, 10)(gen),
                            std::uniform_int_distribution<int64_t>(1, 100000)(gen),
                            i % 3 == 0 ? WorkloadClass::kAnalytical : WorkloadClass::kOnline));
    }
    s.push_back({WorkloadClass::kOnline, "T", 1.0, 5, 5, SampleStatus::kAborted});
    s.push_back({WorkloadClass::kOnline, "T", 1.0, 0, 0, SampleStatus::kDropped});
    auto a = Summarize(s, 1, 8);
    std::shuffle(s.begin(), s.end(), gen);
    auto b = Summarize(s, 1, 8);
    CHECK(ReportToJson(a) == ReportToJson(b));
  }
  SUBCASE("abort and drop rates") {
    std::vector<LatencySample> s = {Committed(1, 10), Committed(1, 10), Committed(1, 10)};
    s.push_back({WorkloadClass::kOnline, "T", 1, 30, 30, SampleStatus::kAborted});
    s.push_back({WorkloadClass::kOnline, "T", 1, 0, 0, SampleStatus::kDropped});
    auto c = Summarize(s, 0, 2).classes[0];
    CHECK(c.abort_rate == doctest::Approx(0.25));
    CHECK(c.drop_rate == doctest::Approx(0.2));
  }
  SUBCASE("no commits: statistics absent") {
    auto r = Summarize({}, 0, 10, {WorkloadClass::kAnalytical});
    REQUIRE(r.classes.size() == 1);
    CHECK(r.classes[0].count == 0);
    CHECK_FALSE(r.classes[0].latency.has_value());
    CHECK(ReportFields(r.classes[0]).count("p50_us") == 0);
  }
}

TEST_CASE("aggregate runs") {
  auto report_with_mean = [](int64_t us) {
    return Summarize({Committed(0.5, us)}, 0, 1);
  };
  SUBCASE("identical reports have zero spread") {
    auto r = report_with_mean(500);
    auto agg = AggregateRuns({r, r, r});
    for (const auto& [k, s] : agg.classes[0].stats) CHECK(s.stddev == 0.0);
  }
  SUBCASE("means 1, 2, 3") {
    auto agg = AggregateRuns({report_with_mean(1), report_with_mean(2), report_with_mean(3)});
    const auto& s = agg.classes[0].stats.at("mean_us");
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.stddev == doctest::Approx(1.0));
    CHECK(agg.runs == 3);
  }
  SUBCASE("single report") {
    auto agg = AggregateRuns({report_with_mean(4)});
    CHECK(agg.classes[0].stats.at("mean_us").stddev == 0.0);
  }
  SUBCASE("shape mismatch and empty input") {
    auto a = report_with_mean(1);
    auto b = Summarize({Committed(0.5, 1, WorkloadClass::kHybrid)}, 0, 1);
    CHECK(CategoryOf([&] { AggregateRuns({a, b}); }) == ErrorCategory::kValidation);
    CHECK(CategoryOf([&] { AggregateRuns({}); }) == ErrorCategory::kValidation);
  }
}

TEST_CASE("report serialization") {
  std::vector<LatencySample> s;
  for (int i = 0; i < 100; ++i) s.push_back(Committed(i * 0.1, 10 * (i + 1)));
  auto r = Summarize(s, 0, 10, {WorkloadClass::kOnline, WorkloadClass::kAnalytical});
  r.benchmark = "subenchmark";
  r.mode = "concurrent";
  r.mean_in_flight = 1.5;
  r.tags["olap_rate"] = "2";
  const std::string json = ReportToJson(r);
  for (const auto& name : ReportFieldNames()) CHECK(json.find("\"" + name + "\"") != std::string::npos);
  auto back = ReportFromJson(json);
  CHECK(ReportToJson(back) == json);
  CHECK_FALSE(back.Find(WorkloadClass::kAnalytical)->latency.has_value());
  CHECK(ReportToText(r).find("oltp") != std::string::npos);
  CHECK(CategoryOf([] { ReportFromJson("{"); }) == ErrorCategory::kValidation);
}

TEST_CASE("recorder accepts concurrent appends") {
  Recorder rec;
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&rec] {
      for (int i = 0; i < 1000; ++i) rec.Record(Committed(0, 1));
    });
  }
  for (auto& t : threads) t.join();
  CHECK(rec.size() == 8000);
  CHECK(rec.Snapshot().size() == 8000);
}
