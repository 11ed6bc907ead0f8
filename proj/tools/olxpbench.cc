// olxpbench: schema, population, workload runs and reports for the built-in
// HTAP suites.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "olxp/analysis.h"
#include "olxp/benchspec.h"
#include "olxp/config.h"
#include "olxp/datagen.h"
#include "olxp/driver.h"
#include "olxp/error.h"
#include "olxp/loadgen.h"
#include "olxp/metrics.h"

namespace {

using namespace olxp;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, fmt::format("{}: cannot read", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path);
  if (!out || !(out << content)) throw Error(ErrorCategory::kIo, fmt::format("{}: cannot write", path));
}

// --config plus one flag per scalar field of the run specification.
struct SpecFlags {
  std::string config;
  std::string benchmark, mode, loop, jitter, target, isolation, output;
  bool fk = false;
  int64_t scale = 0;
  uint64_t seed = 0;
  double oltp_rate = 0, olap_rate = 0, hybrid_rate = 0, warmup = 0, duration = 0, grace = 0;
  int terminals = 0, pool = 0;
  size_t queue_capacity = 0;
  std::map<std::string, CLI::Option*> given;

  void Register(CLI::App* app) {
    app->add_option("-c,--config", config, "XML run specification");
    auto add = [&](const std::string& flag, auto& var, const std::string& help) {
      given[flag] = app->add_option("--" + flag, var, help);
    };
    add("benchmark", benchmark, "subenchmark, fibenchmark or tabenchmark");
    given["fk"] = app->add_flag("--fk", fk, "use the foreign-key DDL variant");
    add("scale", scale, "scale factor");
    add("seed", seed, "random seed");
    add("mode", mode, "sequential, concurrent or hybrid");
    add("loop", loop, "open or closed");
    add("jitter", jitter, "fixed or poisson");
    add("oltp-rate", oltp_rate, "online requests per second");
    add("olap-rate", olap_rate, "analytical requests per second");
    add("hybrid-rate", hybrid_rate, "hybrid requests per second");
    add("warmup", warmup, "warm-up seconds");
    add("duration", duration, "measured seconds");
    add("grace", grace, "seconds allowed for draining after the horizon");
    add("terminals", terminals, "closed-loop terminals");
    add("queue-capacity", queue_capacity, "per-class request queue bound");
    add("target", target, "backend descriptor, e.g. embedded:///tmp/bench.db");
    add("pool", pool, "sessions in the driver pool");
    add("isolation", isolation, "read-committed, repeatable-read or snapshot");
    add("output", output, "report file");
  }

  bool Has(const std::string& flag) const { return given.at(flag)->count() > 0; }

  template <typename T>
  static T Enum(const std::string& flag, const std::string& v, std::optional<T> (*parse)(std::string_view)) {
    auto r = parse(v);
    if (!r) throw Error(ErrorCategory::kConfig, fmt::format("--{}: unknown value '{}'", flag, v));
    return *r;
  }

  // Schema-level commands ignore rates, so a missing rate is filled in to
  // satisfy validation.
  XmlRunSpec Resolve(bool schema_only = false) const {
    XmlRunSpec spec;
    if (!config.empty()) {
      spec = ParseConfig(config);
    } else {
      spec.run.benchmark.clear();
      spec.run.target = EmbeddedBackend(4);
    }
    RunConfig& r = spec.run;
    if (Has("benchmark")) r.benchmark = benchmark;
    if (Has("fk")) spec.fk = fk;
    if (Has("scale")) r.scale = scale;
    if (Has("seed")) r.seed = seed;
    if (Has("mode")) r.mode = Enum<RunMode>("mode", mode, ParseMode);
    if (Has("loop")) r.loop = Enum<LoopKind>("loop", loop, ParseLoop);
    if (Has("jitter")) r.jitter = Enum<Jitter>("jitter", jitter, ParseJitter);
    if (Has("oltp-rate")) r.oltp_rate = oltp_rate;
    if (Has("olap-rate")) r.olap_rate = olap_rate;
    if (Has("hybrid-rate")) r.hybrid_rate = hybrid_rate;
    if (Has("warmup")) r.warmup_s = warmup;
    if (Has("duration")) r.duration_s = duration;
    if (Has("grace")) r.grace_s = grace;
    if (Has("terminals")) r.terminals = terminals;
    if (Has("queue-capacity")) r.queue_capacity = queue_capacity;
    if (Has("output")) spec.output = output;
    const Isolation iso =
        Has("isolation") ? Enum<Isolation>("isolation", isolation, ParseIsolation) : r.target.isolation;
    try {
      r.target = MakeTarget(Has("target") ? target : r.target.descriptor,
                            Has("pool") ? pool : r.target.pool_size, iso);
    } catch (const Error& e) {
      throw Error(e.category(), fmt::format("--target: {}", e.what()));
    }
    if (r.benchmark.empty()) {
      throw Error(ErrorCategory::kConfig, "--benchmark: missing (or pass --config)");
    }
    if (schema_only && r.ActiveClasses().empty()) {
      (r.mode == RunMode::kHybrid ? r.hybrid_rate : r.oltp_rate) = 1;
    }
    ValidateSpec(spec);
    return spec;
  }
};

void PrintRunDiagnostics(const RunResult& r, const RunConfig& config) {
  for (WorkloadClass cls : config.ActiveClasses()) {
    if (config.loop == LoopKind::kClosed) break;
    DispatchAccuracy a = MeasureDispatch(r.dispatch, cls, config.horizon_s());
    std::cerr << fmt::format("dispatch {}: {} sends, {:.3f}/s achieved ({} configured), {:.2f}% within 1 ms\n",
                             ClassName(cls), a.sends, a.achieved_rate, config.RateOf(cls),
                             a.within_1ms * 100);
  }
  if (r.timed_out > 0) std::cerr << fmt::format("{} queued requests timed out\n", r.timed_out);
  for (const auto& [msg, n] : r.errors) std::cerr << fmt::format("failed x{}: {}\n", n, msg);
}

void Emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    WriteFile(path, content);
    std::cerr << "wrote " << path << "\n";
  }
}

std::vector<double> ParseValues(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCategory::kConfig, fmt::format("--values: '{}' is not a number", item));
    }
  }
  return out;
}

int Main(int argc, char** argv) {
  CLI::App app{"HTAP benchmark harness"};
  app.require_subcommand(1);

  SpecFlags ddl_flags, populate_flags, run_flags, sweep_flags;

  auto* ddl = app.add_subcommand("ddl", "print the schema DDL, or create it with --apply");
  ddl_flags.Register(ddl);
  bool apply = false;
  ddl->add_flag("--apply", apply, "create the schema on the target");

  auto* populate = app.add_subcommand("populate", "load the initial data set");
  populate_flags.Register(populate);
  bool create_first = false;
  populate->add_flag("--create", create_first, "create the schema first");
  int64_t batch = 1000;
  populate->add_option("--batch", batch, "rows per load transaction");

  auto* run = app.add_subcommand("run", "drive one workload run and write its report");
  run_flags.Register(run);
  bool prepare = false;
  run->add_flag("--prepare", prepare, "create and populate the schema before running");

  auto* sweep = app.add_subcommand("sweep", "one run per rate value along an axis");
  sweep_flags.Register(sweep);
  std::string axis = "olap_rate", values_text, out_dir = ".";
  bool sweep_prepare = false;
  sweep->add_option("--axis", axis, "oltp_rate or olap_rate");
  sweep->add_option("--values", values_text, "comma-separated rates")->required();
  sweep->add_option("--out-dir", out_dir, "directory for reports and the curve CSV");
  sweep->add_flag("--prepare", sweep_prepare, "create and populate the schema first");

  auto* report = app.add_subcommand("report", "render or aggregate report files");
  std::vector<std::string> report_files;
  std::string format = "text", baseline_file;
  report->add_option("files", report_files, "report JSON files")->required();
  report->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  report->add_option("--baseline", baseline_file, "report to compute interference against");

  auto* check = app.add_subcommand("check-schema", "semantic consistency of a suite");
  std::string check_name;
  check->add_option("benchmark", check_name, "suite name, or 'stitched' for the negative fixture")
      ->required();

  auto* inventory = app.add_subcommand("inventory", "list tables and templates as JSON");
  std::string inventory_name;
  inventory->add_option("benchmark", inventory_name)->required();

  auto* nlo = app.add_subcommand("lock-overhead", "normalized lock overhead from sample counts");
  std::string counts_file;
  nlo->add_option("file", counts_file, "lines of 'LS TS BLO'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << fmt::format("error[{}]: {}\n", CategoryName(ErrorCategory::kConfig), e.what());
    return ExitCode(ErrorCategory::kConfig);
  }

  if (ddl->parsed()) {
    XmlRunSpec spec = ddl_flags.Resolve(true);
    auto catalog = LoadCatalog(spec.run.benchmark);
    if (!apply) {
      std::cout << EmitDdl(*catalog, spec.fk);
      return 0;
    }
    auto pool = Connect(spec.run.target);
    CreateSchema(*pool, *catalog, spec.fk);
    std::cerr << fmt::format("created {} tables on {}\n", catalog->tables.size(),
                             spec.run.target.descriptor);
    return 0;
  }

  if (populate->parsed()) {
    XmlRunSpec spec = populate_flags.Resolve(true);
    auto catalog = LoadCatalog(spec.run.benchmark);
    auto pool = Connect(spec.run.target);
    if (create_first) CreateSchema(*pool, *catalog, spec.fk);
    LoadSummary summary = Populate(*catalog, spec.run.scale, spec.run.seed, *pool, {batch});
    std::cout << summary.ToText();
    return 0;
  }

  if (run->parsed() || sweep->parsed()) {
    const bool is_sweep = sweep->parsed();
    XmlRunSpec spec = is_sweep ? sweep_flags.Resolve() : run_flags.Resolve();
    auto catalog = LoadCatalog(spec.run.benchmark);
    auto pool = Connect(spec.run.target);
    if (is_sweep ? sweep_prepare : prepare) {
      CreateSchema(*pool, *catalog, spec.fk);
      std::cerr << Populate(*catalog, spec.run.scale, spec.run.seed, *pool).ToText();
    }
    if (!is_sweep) {
      RunResult r = Run(spec.run, *catalog, *pool);
      PrintRunDiagnostics(r, spec.run);
      std::cerr << ReportToText(r.report);
      Emit(spec.output, ReportToJson(r.report));
      return 0;
    }
    std::vector<double> values = ParseValues(values_text);
    std::vector<RunResult> runs = Sweep(spec.run, axis, values, *catalog, *pool);
    std::vector<RunReport> reports;
    for (const RunResult& r : runs) {
      const std::string& v = r.report.tags.at(axis);
      PrintRunDiagnostics(r, spec.run);
      Emit((std::filesystem::path(out_dir) / fmt::format("report-{}-{}.json", axis, v)).string(),
           ReportToJson(r.report));
      reports.push_back(r.report);
    }
    if (!reports.empty()) {
      const WorkloadClass cls =
          spec.run.mode == RunMode::kHybrid ? WorkloadClass::kHybrid : WorkloadClass::kOnline;
      Emit((std::filesystem::path(out_dir) / fmt::format("sweep-{}.csv", axis)).string(),
           SweepCsv(axis, reports, cls));
    }
    return 0;
  }

  if (report->parsed()) {
    std::vector<RunReport> reports;
    for (const auto& f : report_files) {
      try {
        reports.push_back(ReportFromJson(ReadFile(f)));
      } catch (const Error& e) {
        throw Error(e.category(), fmt::format("{}: {}", f, e.what()));
      }
    }
    if (!baseline_file.empty()) {
      RunReport base = ReportFromJson(ReadFile(baseline_file));
      for (size_t i = 0; i < reports.size(); ++i) {
        for (const ClassReport& c : reports[i].classes) {
          if (!base.Find(c.cls)) continue;
          InterferenceReport ir = Interference(base, reports[i], c.cls);
          std::cout << fmt::format(
              "{} {}: latency x{:.3f}, p95 x{:.3f}, throughput degradation {:.1f}%\n",
              report_files[i], ClassName(c.cls), ir.latency_inflation, ir.tail_inflation,
              ir.throughput_degradation * 100);
        }
      }
      return 0;
    }
    if (reports.size() == 1) {
      std::cout << (format == "json" ? ReportToJson(reports[0]) : ReportToText(reports[0]));
    } else {
      AggregateReport agg = AggregateRuns(reports);
      std::cout << (format == "json" ? AggregateToJson(agg) : AggregateToText(agg));
    }
    return 0;
  }

  if (check->parsed()) {
    auto catalog = check_name == "stitched" ? StitchedFixture() : LoadCatalog(check_name);
    ConsistencyReport r = CheckSemanticConsistency(*catalog);
    std::cout << r.ToText();
    return r.pass ? 0 : 1;
  }

  if (inventory->parsed()) {
    std::cout << InventoryJson(*LoadCatalog(inventory_name));
    return 0;
  }

  if (nlo->parsed()) {
    for (const LockSampleCounts& c : ParseLockCounts(ReadFile(counts_file))) {
      std::cout << fmt::format("{} {} {} -> {:.2f}%\n", c.lock_samples, c.total_samples,
                               c.baseline_overhead, NormalizedLockOverhead(c));
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const olxp::Error& e) {
    std::cerr << fmt::format("error[{}]: {}\n", olxp::CategoryName(e.category()), e.what());
    return olxp::ExitCode(e.category());
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error[internal]: {}\n", e.what());
    return 1;
  }
}
