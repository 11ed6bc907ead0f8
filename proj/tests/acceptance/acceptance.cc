// Acceptance checks. One line per criterion:
//   criterion <n>: PASS|FAIL <name> (<details>)
// Usage: olxp_acceptance [--criterion N]...   (no flag runs all of them)

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "olxp/analysis.h"
#include "olxp/benchspec.h"
#include "olxp/datagen.h"
#include "olxp/driver.h"
#include "olxp/loadgen.h"
#include "olxp/metrics.h"

using namespace olxp;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED " + what);
    }
  }
  void Note(const std::string& what) { notes.push_back(what); }
};

class ScratchDir {
 public:
  ScratchDir() {
    std::string tmpl = (fs::temp_directory_path() / "olxp-accept-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::shared_ptr<Pool> Populated(const BenchmarkCatalog& c, int64_t scale, uint64_t seed,
                                int pool_size, const std::string& path = "") {
  auto pool = Connect(MakeTarget("embedded://" + path, pool_size, Isolation::kRepeatableRead));
  CreateSchema(*pool, c, false);
  Populate(c, scale, seed, *pool);
  return pool;
}

std::map<std::string, uint64_t> Checksums(Pool& pool, const BenchmarkCatalog& c) {
  Lease lease = pool.Acquire();
  return CatalogChecksums(*lease, c);
}

// ---------------------------------------------------------------------------

// Published per-suite feature counts.
struct Features {
  size_t tables, columns, indexes, online, analytical, hybrid;
  Rational online_ro, hybrid_ro;
};

void Criterion1(Verdict& v) {
  const std::map<std::string, Features> expected = {
      {"subenchmark", {9, 92, 3, 5, 9, 5, Rational::Make(8, 100), Rational::Make(60, 100)}},
      {"fibenchmark", {3, 6, 4, 6, 4, 6, Rational::Make(15, 100), Rational::Make(20, 100)}},
      {"tabenchmark", {4, 51, 5, 7, 5, 6, Rational::Make(80, 100), Rational::Make(40, 100)}},
  };
  for (const auto& [name, e] : expected) {
    auto c = LoadCatalog(name);
    size_t columns = 0, indexes = 0;
    for (const auto& t : c->tables) {
      columns += t.columns.size();
      indexes += t.indexes.size();
    }
    const Rational oro = DefaultMix(*c, WorkloadClass::kOnline).ReadOnlyMass();
    const Rational hro = DefaultMix(*c, WorkloadClass::kHybrid).ReadOnlyMass();
    v.Check(c->tables.size() == e.tables, name + " tables");
    v.Check(columns == e.columns, name + " columns");
    v.Check(indexes == e.indexes, name + " indexes");
    v.Check(c->online.size() == e.online, name + " online templates");
    v.Check(c->analytical.size() == e.analytical, name + " analytical templates");
    v.Check(c->hybrid.size() == e.hybrid, name + " hybrid templates");
    v.Check(oro == e.online_ro, name + " online read-only mass");
    v.Check(hro == e.hybrid_ro, name + " hybrid read-only mass");
    v.Note(fmt::format("{} {}/{}/{}/{}/{}/{} ro {}/{} {}/{}", name, c->tables.size(), columns,
                       indexes, c->online.size(), c->analytical.size(), c->hybrid.size(), oro.num,
                       oro.den, hro.num, hro.den));
  }
}

void Criterion2(Verdict& v) {
  for (const auto& name : BuiltinBenchmarks()) {
    ConsistencyReport r = CheckSemanticConsistency(*LoadCatalog(name));
    v.Check(r.pass && r.violations.empty(), name + " passes");
  }
  ConsistencyReport s = CheckSemanticConsistency(*StitchedFixture());
  v.Check(!s.pass, "stitched fixture fails");
  v.Check(s.unwritten_tables == std::set<std::string>{"NATION", "REGION", "SUPPLIER"},
          "stitched fixture lists exactly NATION, REGION, SUPPLIER");
  std::string listed;
  for (const auto& t : s.unwritten_tables) listed += (listed.empty() ? "" : ",") + t;
  v.Note("stitched unwritten: " + listed);
}

void Criterion3(Verdict& v) {
  constexpr int kTrials = 100;
  Rng rng(303);
  int trials = 0, with_writes = 0, aborted = 0;
  const auto& names = BuiltinBenchmarks();
  for (size_t b = 0; b < names.size(); ++b) {
    auto c = LoadCatalog(names[b]);
    auto pool = Populated(*c, 1, 42, 1);
    const auto before_all = Checksums(*pool, *c);
    const int share = kTrials / 3 + (b < kTrials % 3 ? 1 : 0);
    std::optional<Lease> lease(pool->Acquire());
    for (int t = 0; t < share; ++t, ++trials) {
      const HybridTemplate& h =
          c->hybrid[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(c->hybrid.size()) - 1))];
      BoundTransaction txn = Instantiate(*c, h, rng, 1);
      const size_t rt = *txn.realtime_index;
      const size_t k = static_cast<size_t>(
          rng.UniformInt(static_cast<int64_t>(rt), static_cast<int64_t>(txn.statements.size()) - 1));
      std::set<std::string> written;
      bool wrote = false;
      for (size_t i = 0; i < txn.statements.size(); ++i) {
        const auto& w = txn.statements[i].source->tables_written;
        written.insert(w.begin(), w.end());
        if (i <= k && !w.empty()) wrote = true;
      }
      with_writes += wrote;
      std::map<std::string, uint64_t> before, after;
      for (const auto& table : written) before[table] = TableChecksum(**lease, table);
      ExecuteOptions opts;
      opts.abort_after_statement = k;
      ExecutionOutcome out = ExecuteTransaction(**lease, txn, opts);
      aborted += out.status == OutcomeStatus::kFailed;
      for (const auto& table : written) after[table] = TableChecksum(**lease, table);
      v.Check(before == after, fmt::format("{} {} abort after {} left data unchanged", names[b], h.name, k));
    }
    lease.reset();
    v.Check(Checksums(*pool, *c) == before_all, names[b] + " full checksums unchanged");
  }
  v.Check(trials == kTrials, "trial count");
  v.Check(aborted == kTrials, "every trial rolled back");
  v.Note(fmt::format("{} trials, {} with writes before the abort", trials, with_writes));
}

void Criterion4(Verdict& v) {
  auto fi = LoadCatalog("fibenchmark");
  auto pool = Populated(*fi, 1, 42, 4);
  for (double rate : {100.0, 1000.0}) {
    RunConfig c;
    c.benchmark = "fibenchmark";
    c.scale = 1;
    c.seed = 4;
    c.warmup_s = 0;
    c.duration_s = 10;
    c.oltp_rate = rate;
    c.weights = {{"Balance", 1}};
    const auto plan = PlanOpenLoop(c, *fi);  // fixed before anything runs
    RunResult r = Run(c, *fi, *pool);
    DispatchAccuracy a = MeasureDispatch(r.dispatch, WorkloadClass::kOnline, c.horizon_s());
    const double commit_rate = r.report.classes[0].tput;
    v.Check(std::abs(a.achieved_rate - rate) <= 0.01 * rate,
            fmt::format("dispatch rate at {}", rate));
    v.Check(std::abs(commit_rate - rate) <= 0.01 * rate, fmt::format("commit rate at {}", rate));
    bool same = r.dispatch.size() == plan[0].requests.size();
    for (size_t i = 0; same && i < r.dispatch.size(); ++i) {
      same = r.dispatch[i].scheduled == plan[0].requests[i].send_time &&
             r.dispatch[i].template_name == "Balance";
    }
    v.Check(same, fmt::format("dispatch at {} follows the precomputed schedule", rate));
    v.Note(fmt::format("{}/s: dispatched {:.2f}/s, committed {:.2f}/s, {:.2f}% within 1 ms, max "
                       "error {:.2f} ms",
                       rate, a.achieved_rate, commit_rate, a.within_1ms * 100,
                       a.max_abs_error_s * 1e3));

    if (rate == 100.0) {
      // Same schedule while a single session is saturated by analytical load.
      auto slow = Populated(*fi, 1, 42, 1);
      RunConfig loaded = c;
      loaded.olap_rate = 50;
      RunResult s = Run(loaded, *fi, *slow);
      std::vector<double> times;
      for (const auto& d : s.dispatch) {
        if (d.cls == WorkloadClass::kOnline) times.push_back(d.scheduled);
      }
      std::vector<double> expected;
      for (const auto& p : plan[0].requests) expected.push_back(p.send_time);
      v.Check(times == expected, "schedule unchanged under slow responses");
      const auto* olap = s.report.Find(WorkloadClass::kAnalytical);
      v.Note(fmt::format("under load: oltp p95 {} us vs {} us idle, olap drops {}",
                         s.report.classes[0].latency ? s.report.classes[0].latency->p95_us : -1,
                         r.report.classes[0].latency->p95_us, olap ? olap->dropped : 0));
    }
  }
}

int64_t OraclePercentile(std::vector<int64_t> v, int64_t num, int64_t den) {
  std::sort(v.begin(), v.end());
  const int64_t n = static_cast<int64_t>(v.size());
  int64_t rank = (num * n + den - 1) / den;
  rank = std::clamp<int64_t>(rank, 1, n);
  return v[static_cast<size_t>(rank - 1)];
}

void Criterion5(Verdict& v) {
  std::mt19937_64 gen(5);
  const std::pair<int64_t, int64_t> ps[] = {{1, 2},       {9, 10},   {19, 20}, {999, 1000},
                                            {9999, 10000}, {1, 1000}, {1, 1},   {2, 3}};
  int mismatches = 0, sets = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    size_t n;
    if (trial == 0) {
      n = 1;
    } else if (trial == 1) {
      n = 100000;
    } else {
      n = static_cast<size_t>(std::llround(std::exp(std::uniform_real_distribution<double>(0, std::log(100000.0))(gen))));
    }
    const int64_t hi = std::uniform_int_distribution<int64_t>(1, trial % 2 ? 50 : 10000000)(gen);
    std::vector<int64_t> s(n);
    for (auto& x : s) x = std::uniform_int_distribution<int64_t>(0, hi)(gen);
    for (auto [num, den] : ps) {
      mismatches += Percentile(s, static_cast<double>(num) / static_cast<double>(den)) !=
                    OraclePercentile(s, num, den);
    }
    ++sets;
  }
  v.Check(mismatches == 0, "exact agreement");
  v.Note(fmt::format("{} multisets x {} percentiles, {} mismatches", sets, std::size(ps), mismatches));
}

void Criterion6(Verdict& v) {
  auto su = LoadCatalog("subenchmark");
  auto pool = Populated(*su, 1, 42, 4);
  RunConfig c;
  c.benchmark = "subenchmark";
  c.scale = 1;
  c.seed = 6;
  c.warmup_s = 0;
  c.duration_s = 20;
  c.oltp_rate = 500;
  RunResult r = Run(c, *su, *pool);
  int64_t n = 0, ro = 0;
  for (const auto& d : r.dispatch) {
    if (d.cls != WorkloadClass::kOnline) continue;
    ++n;
    ro += d.read_only;
  }
  const double frac = static_cast<double>(ro) / static_cast<double>(n);
  const double sigma = std::sqrt(0.08 * 0.92 / static_cast<double>(n));
  v.Check(n >= 10000, "at least 10000 dispatched");
  v.Check(std::abs(frac - 0.08) <= 3 * sigma, "read-only fraction within 3 sigma of 0.08");
  v.Note(fmt::format("N={} read-only={} fraction={:.4f} bound=0.08+-{:.4f}; committed {} in window",
                     n, ro, frac, 3 * sigma, r.report.classes[0].count));
}

void Criterion7(Verdict& v) {
  v.Check(LittlesLawL(30, 1.5) == 45.0, "L(30, 1.5 s) = 45");
  v.Check(LittlesLawL(0, 1.5) == 0.0, "L(0, W) = 0");
  std::mt19937_64 gen(7);
  int bilinear_exact = 0, scale_exact = 0;
  for (int i = 0; i < 1000; ++i) {
    // Dyadic operands keep every product exact in binary floating point.
    const double lambda = std::uniform_int_distribution<int>(0, 1 << 20)(gen) / 1024.0;
    const double w = std::uniform_int_distribution<int>(1, 1 << 20)(gen) / 1024.0;
    const double a = std::uniform_int_distribution<int>(0, 1 << 10)(gen) / 16.0;
    bilinear_exact += LittlesLawL(a * lambda, w) == a * LittlesLawL(lambda, w);
    const double ts = std::uniform_int_distribution<int>(1, 1 << 20)(gen);
    const double ls = std::uniform_int_distribution<int>(0, static_cast<int>(ts))(gen);
    const double blo = std::uniform_int_distribution<int>(1, 1024)(gen) / 1024.0;
    const double k = std::ldexp(1.0, std::uniform_int_distribution<int>(0, 20)(gen));
    scale_exact += NormalizedLockOverhead({ls * k, ts * k, blo}) == NormalizedLockOverhead({ls, ts, blo});
  }
  v.Check(bilinear_exact == 1000, "bilinearity exact on 1000 cases");
  v.Check(scale_exact == 1000, "NLO scale invariance exact on 1000 cases");
  v.Check(NormalizedLockOverhead({100, 1000, 0.1}) == 100.0, "NLO(100, 1000, 0.1) = 100%");
  v.Check(NormalizedLockOverhead({0, 1000, 0.1}) == 0.0, "NLO(0, 1000, 0.1) = 0%");
  v.Note(fmt::format("L(30,1.5)={} NLO(100,1000,0.1)={}", LittlesLawL(30, 1.5),
                     NormalizedLockOverhead({100, 1000, 0.1})));
}

void Criterion8(Verdict& v) {
  constexpr int kRuns = 3;
  constexpr double kOltpRate = 30;
  constexpr double kOlapRate = 2;
  auto su = LoadCatalog("subenchmark");
  ScratchDir dir;
  const std::string base_db = dir.File("template.db");
  Populated(*su, 1, 42, 1, base_db);  // closed on return; WAL checkpointed

  auto run_arm = [&](const std::string& arm, int rep) {
    const std::string db = dir.File("run.db");
    for (const char* suffix : {"", "-wal", "-shm"}) fs::remove(db + suffix);
    fs::copy_file(base_db, db);
    auto pool = Connect(MakeTarget("embedded://" + db, 4, Isolation::kRepeatableRead));
    RunConfig c;
    c.benchmark = "subenchmark";
    c.scale = 1;
    c.seed = 800 + static_cast<uint64_t>(rep);
    c.warmup_s = 60;
    c.duration_s = 120;
    if (arm == "hybrid") {
      c.mode = RunMode::kHybrid;
      c.hybrid_rate = kOltpRate;
    } else {
      c.oltp_rate = kOltpRate;
      c.olap_rate = arm == "olap" ? kOlapRate : 0;
    }
    RunResult r = Run(c, *su, *pool);
    const ClassReport& main =
        *r.report.Find(arm == "hybrid" ? WorkloadClass::kHybrid : WorkloadClass::kOnline);
    const double mean = main.latency ? main.latency->mean_us : NAN;
    std::string extra;
    if (const ClassReport* olap = r.report.Find(WorkloadClass::kAnalytical)) {
      extra = fmt::format(", olap committed {} dropped {}", olap->count, olap->dropped);
    }
    v.Note(fmt::format("rep {} {}: mean {:.0f} us, p95 {} us, tput {:.2f}/s{}", rep, arm, mean,
                       main.latency ? main.latency->p95_us : -1, main.tput, extra));
    return mean;
  };

  std::map<std::string, double> sum;
  for (int rep = 0; rep < kRuns; ++rep) {
    for (const char* arm : {"baseline", "olap", "hybrid"}) sum[arm] += run_arm(arm, rep);
  }
  const double baseline = sum["baseline"] / kRuns;
  const double olap = sum["olap"] / kRuns;
  const double hybrid = sum["hybrid"] / kRuns;
  v.Check(hybrid > baseline, "(a) hybrid mean latency exceeds plain OLTP at matched rate");
  v.Check(olap > baseline, "(b) OLAP at 2 req/s raises OLTP mean latency");
  v.Note(fmt::format("3-run means: baseline {:.0f} us, with OLAP {:.0f} us (x{:.2f}), hybrid {:.0f} us (x{:.2f})",
                     baseline, olap, olap / baseline, hybrid, hybrid / baseline));
}

void Criterion9(Verdict& v) {
  for (const auto& name : BuiltinBenchmarks()) {
    auto c = LoadCatalog(name);
    auto a = Populated(*c, 1, 9, 1);
    auto b = Populated(*c, 1, 9, 1);
    const auto ca = Checksums(*a, *c), cb = Checksums(*b, *c);
    v.Check(ca == cb, name + " populate checksums identical");
    v.Check(ca.size() == c->tables.size(), name + " every table checksummed");
  }
  auto fi = LoadCatalog("fibenchmark");
  RunConfig cfg;
  cfg.benchmark = "fibenchmark";
  cfg.scale = 1;
  cfg.seed = 99;
  cfg.warmup_s = 1;
  cfg.duration_s = 4;
  cfg.oltp_rate = 200;
  cfg.olap_rate = 5;
  cfg.jitter = Jitter::kPoisson;
  std::vector<std::vector<DispatchRecord>> schedules;
  for (int i = 0; i < 2; ++i) {
    auto pool = Populated(*fi, 1, 9, 2);
    schedules.push_back(Run(cfg, *fi, *pool).dispatch);
  }
  auto key = [](std::vector<DispatchRecord> d) {
    std::vector<std::tuple<int, double, std::string>> k;
    for (const auto& r : d) k.emplace_back(static_cast<int>(r.cls), r.scheduled, r.template_name);
    std::sort(k.begin(), k.end());
    return k;
  };
  const auto k0 = key(schedules[0]);
  v.Check(!k0.empty() && k0 == key(schedules[1]), "two runs dispatch identical schedules");
  v.Note(fmt::format("3 suites x 2 populates; {} dispatches compared", k0.size()));
}

struct Shell {
  int exit_code = -1;
  std::string out;
};

Shell Exec(const std::string& cmd) {
  Shell r;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void Criterion10(Verdict& v) {
  const std::string bin = OLXPBENCH_PATH;
  for (const auto& name : BuiltinBenchmarks()) {
    ScratchDir dir;
    const std::string common =
        fmt::format("--benchmark {} --scale 1 --target embedded://{}", name, dir.File("db.sqlite"));
    v.Check(Exec(bin + " ddl --apply " + common).exit_code == 0, name + " ddl");
    v.Check(Exec(bin + " populate " + common).exit_code == 0, name + " populate");
    struct Arm {
      std::string flags, file;
      std::vector<WorkloadClass> classes;
    };
    const std::vector<Arm> arms = {
        {"--oltp-rate 20 --olap-rate 1", "concurrent.json",
         {WorkloadClass::kOnline, WorkloadClass::kAnalytical}},
        {"--mode hybrid --hybrid-rate 10", "hybrid.json", {WorkloadClass::kHybrid}},
    };
    for (const auto& arm : arms) {
      const std::string out = dir.File(arm.file);
      Shell run = Exec(fmt::format("{} run {} {} --warmup 2 --duration 12 --output {}", bin,
                                   common, arm.flags, out));
      v.Check(run.exit_code == 0, name + " run " + arm.file);
      Shell rep = Exec(bin + " report --format json " + out);
      v.Check(rep.exit_code == 0, name + " report " + arm.file);
      if (rep.exit_code != 0) continue;
      RunReport r = ReportFromJson(rep.out);
      v.Check(r.mean_in_flight.has_value(), name + " mean in-flight present");
      for (WorkloadClass cls : arm.classes) {
        const ClassReport* c = r.Find(cls);
        const std::string what = fmt::format("{} {}", name, ClassName(cls));
        v.Check(c != nullptr, what + " present");
        if (!c) continue;
        v.Check(c->count > 0 && c->tput > 0, what + " committed");
        v.Check(c->latency && c->service, what + " latency fields populated");
        v.Check(ReportFields(*c).size() == ReportFieldNames().size(), what + " all fields");
        v.Check(c->latency && c->latency->Ordered(), what + " percentiles ordered");
        v.Check(c->service && c->service->Ordered(), what + " service percentiles ordered");
        v.Check(!c->throughput_series.empty(), what + " throughput series");
        v.Note(fmt::format("{}: n={} p50={} p9999={} us", what, c->count,
                           c->latency ? c->latency->p50_us : -1,
                           c->latency ? c->latency->p9999_us : -1));
      }
    }
  }
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<void(Verdict&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number (repeatable)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "catalog conformance", 1, Criterion1},
      {2, "semantic consistency", 1, Criterion2},
      {3, "hybrid atomicity", 30, Criterion3},
      {4, "open-loop accuracy", 60, Criterion4},
      {5, "percentile oracle", 60, Criterion5},
      {6, "mix convergence", 60, Criterion6},
      {7, "Little's law and lock overhead", 1, Criterion7},
      {8, "directional interference", 2300, Criterion8},
      {9, "determinism", 120, Criterion9},
      {10, "end-to-end", 600, Criterion10},
  };
  bool ok = true;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.fn(v);
    } catch (const std::exception& e) {
      v.Check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.Check(secs < c.budget_s, fmt::format("runtime under {} s", c.budget_s));
    std::string details;
    for (const auto& n : v.notes) details += (details.empty() ? "" : "; ") + n;
    std::cout << fmt::format("criterion {}: {} {} ({:.1f} s; {})\n", c.id, v.pass ? "PASS" : "FAIL",
                             c.name, secs, details)
              << std::flush;
    ok = ok && v.pass;
  }
  return ok ? 0 : 1;
}
