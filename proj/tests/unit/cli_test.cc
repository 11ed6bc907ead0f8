#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "olxp/error.h"
#include "olxp/metrics.h"
#include "test_support.h"

using namespace olxp;

namespace {

struct Result {
  int exit_code = -1;
  std::string out;  // stdout and stderr
};

Result Cli(const std::string& args) {
  const std::string cmd = std::string(OLXPBENCH_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("check-schema") {
  Result ok = Cli("check-schema subenchmark");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("PASS") != std::string::npos);
  Result bad = Cli("check-schema stitched");
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("SUPPLIER") != std::string::npos);
  Result unknown = Cli("check-schema tpcz");
  CHECK(unknown.exit_code == ExitCode(ErrorCategory::kUnknownBenchmark));
  CHECK(unknown.out.rfind("error[unknown-benchmark]: ", 0) == 0);
}

TEST_CASE("errors carry a category and name the element or flag") {
  testing::TempDir dir;
  const std::string cfg = dir.File("bad.xml");
  std::ofstream(cfg) << "<run_spec><benchmark>subenchmark</benchmark><oltp_rate>1</oltp_rate>"
                        "<speed>9</speed></run_spec>";
  Result r = Cli("run --config " + cfg);
  CHECK(r.exit_code == ExitCode(ErrorCategory::kConfig));
  CHECK(r.out.find("error[config]: ") != std::string::npos);
  CHECK(r.out.find("run_spec/speed") != std::string::npos);

  Result flag = Cli("run --benchmark subenchmark --oltp-rate 1 --mode warp");
  CHECK(flag.exit_code == ExitCode(ErrorCategory::kConfig));
  CHECK(flag.out.find("--mode") != std::string::npos);

  Result conflict = Cli("run --benchmark subenchmark --mode hybrid --oltp-rate 5 --hybrid-rate 5");
  CHECK(conflict.exit_code == ExitCode(ErrorCategory::kValidation));
  CHECK(conflict.out.find("oltp_rate") != std::string::npos);

  Result iso = Cli("run --benchmark fibenchmark --oltp-rate 1 --target memsql://h:3306/db "
                   "--isolation snapshot");
  CHECK(iso.exit_code == ExitCode(ErrorCategory::kUnsupportedIsolation));
  CHECK(iso.out.find("read-committed") != std::string::npos);

  CHECK(Cli("").exit_code == ExitCode(ErrorCategory::kConfig));
  CHECK(Cli("report " + dir.File("nothing.json")).exit_code == ExitCode(ErrorCategory::kIo));
}

TEST_CASE("ddl, populate, run and report") {
  testing::TempDir dir;
  const std::string target = "embedded://" + dir.File("fi.db");
  const std::string common = "--benchmark fibenchmark --scale 1 --target " + target;
  Result ddl = Cli("ddl " + common);
  CHECK(ddl.exit_code == 0);
  CHECK(ddl.out.find("CREATE TABLE ACCOUNT") != std::string::npos);
  CHECK(Cli("ddl --apply " + common).exit_code == 0);
  Result pop = Cli("populate " + common);
  CHECK(pop.exit_code == 0);
  CHECK(pop.out.find("30000") != std::string::npos);
  CHECK(Cli("populate " + common).exit_code == ExitCode(ErrorCategory::kPrecondition));

  const std::string report = dir.File("out/report.json");
  Result run = Cli("run " + common + " --oltp-rate 50 --olap-rate 2 --warmup 0.5 --duration 2 " +
                   "--output " + report);
  REQUIRE(run.exit_code == 0);
  RunReport r = ReportFromJson(Slurp(report));
  REQUIRE(r.classes.size() == 2);
  for (const auto& c : r.classes) {
    CHECK(c.count > 0);
    REQUIRE(c.latency.has_value());
    CHECK(c.latency->Ordered());
    for (const auto& name : ReportFieldNames()) CHECK(ReportFields(c).count(name) == 1);
  }

  Result text = Cli("report " + report);
  CHECK(text.exit_code == 0);
  CHECK(text.out.find("p9999_us") != std::string::npos);
  Result agg = Cli("report --format json " + report + " " + report);
  CHECK(agg.exit_code == 0);
  CHECK(agg.out.find("\"stddev\": 0.0") != std::string::npos);
  Result inter = Cli("report --baseline " + report + " " + report);
  CHECK(inter.out.find("latency x1.000") != std::string::npos);
}

TEST_CASE("sweep writes one report per value and the curve") {
  testing::TempDir dir;
  const std::string out = dir.File("sweep");
  Result r = Cli("sweep --prepare --benchmark fibenchmark --scale 1 --oltp-rate 40 --warmup 0 "
                 "--duration 1 --axis olap_rate --values 0,1,2 --out-dir " + out);
  REQUIRE(r.exit_code == 0);
  for (const char* v : {"0", "1", "2"}) {
    CHECK(std::filesystem::exists(out + "/report-olap_rate-" + v + ".json"));
  }
  const std::string csv = Slurp(out + "/sweep-olap_rate.csv");
  CHECK(csv.rfind("olap_rate,count,tput", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("config file with flag overrides") {
  testing::TempDir dir;
  const std::string cfg = dir.File("run.xml");
  std::ofstream(cfg) << "<run_spec><benchmark>tabenchmark</benchmark><scale>1</scale>"
                        "<mode>hybrid</mode><hybrid_rate>20</hybrid_rate>"
                        "<warmup_s>0</warmup_s><duration_s>1</duration_s>"
                        "<target descriptor=\"embedded://\" pool=\"2\"/></run_spec>";
  const std::string report = dir.File("r.json");
  Result r = Cli("run --prepare --config " + cfg + " --hybrid-rate 10 --output " + report);
  REQUIRE(r.exit_code == 0);
  RunReport rep = ReportFromJson(Slurp(report));
  CHECK(rep.benchmark == "tabenchmark");
  CHECK(rep.mode == "hybrid");
  CHECK(rep.tags.at("hybrid_rate") == "10");
}

TEST_CASE("lock overhead and inventory") {
  testing::TempDir dir;
  std::ofstream(dir.File("counts.txt")) << "100 1000 0.1\n176 1000 0.1\n";
  Result r = Cli("lock-overhead " + dir.File("counts.txt"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("100.00%") != std::string::npos);
  CHECK(r.out.find("176.00%") != std::string::npos);
  Result inv = Cli("inventory fibenchmark");
  CHECK(inv.exit_code == 0);
  CHECK(inv.out.find("\"Balance\"") != std::string::npos);
}
