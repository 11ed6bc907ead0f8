#include <doctest.h>

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <thread>
#include <vector>

#include "olxp/datagen.h"
#include "olxp/driver.h"
#include "test_support.h"

using namespace olxp;
using olxp::testing::CountingSession;
using olxp::testing::TempDir;

namespace {

ErrorCategory CategoryOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("expected an olxp::Error");
  return ErrorCategory::kIo;
}

std::shared_ptr<Pool> Loaded(const std::string& suite, int pool_size = 2, bool fk = false) {
  auto pool = Connect(EmbeddedBackend(pool_size));
  auto catalog = LoadCatalog(suite);
  CreateSchema(*pool, *catalog, fk);
  Populate(*catalog, 1, 42, *pool);
  return pool;
}

}  // namespace

TEST_CASE("descriptor parsing") {
  auto d = ParseDescriptor("tidb://db.example:4000/olxp?user=root&pass=p%40ss");
  CHECK(d.scheme == "tidb");
  CHECK(d.host == "db.example");
  CHECK(d.port == 4000);
  CHECK(d.database == "olxp");
  CHECK(d.options.at("user") == "root");
  CHECK(d.options.at("pass") == "p@ss");
  CHECK_FALSE(d.embedded());

  auto e = ParseDescriptor("embedded:///tmp/x.db?busy_timeout_ms=25");
  CHECK(e.embedded());
  CHECK(e.database == "/tmp/x.db");
  CHECK(e.options.at("busy_timeout_ms") == "25");
  CHECK(ParseDescriptor("embedded://").database.empty());

  for (const char* bad : {"", "tidb", "://x", "tidb://host/db", "tidb://host:port/db",
                          "tidb://host:0/db", "tidb://:4000/db", "tidb://h:4000/",
                          "embedded://x?busy_timeout_ms=abc", "embedded://x?=1"}) {
    CAPTURE(bad);
    CHECK(CategoryOf([&] { ParseDescriptor(bad); }) == ErrorCategory::kValidation);
  }
}

TEST_CASE("connect contract") {
  SUBCASE("embedded pool of 4 gives 4 independent sessions") {
    auto pool = Connect(EmbeddedBackend(4));
    CHECK(pool->size() == 4);
    std::vector<Lease> leases;
    for (int i = 0; i < 4; ++i) leases.push_back(pool->Acquire());
    CHECK_FALSE(pool->TryAcquire().has_value());
    CHECK(pool->in_use() == 4);
    leases[0]->ExecuteScript("CREATE TABLE t (x INTEGER)");
    for (auto& l : leases) CHECK(l->Execute("SELECT COUNT(*) FROM t", {}).rows.size() == 1);
    leases.clear();
    CHECK(pool->in_use() == 0);
  }
  SUBCASE("pool size 0 is rejected") {
    BackendTarget t = EmbeddedBackend(1);
    t.pool_size = 0;
    CHECK(CategoryOf([&] { Connect(t); }) == ErrorCategory::kValidation);
  }
  SUBCASE("read-committed-only backend rejects snapshot and lists its levels") {
    auto t = MakeTarget("memsql://localhost:3306/olxp", 1, Isolation::kSnapshot);
    try {
      Connect(t);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kUnsupportedIsolation);
      CHECK(std::string(e.what()).find("read-committed") != std::string::npos);
    }
  }
  SUBCASE("supported isolation on an unreachable backend") {
    auto t = MakeTarget("memsql://localhost:3306/olxp", 1, Isolation::kReadCommitted);
    CHECK(CategoryOf([&] { Connect(t); }) == ErrorCategory::kBackendUnavailable);
  }
  SUBCASE("unknown kind") {
    auto t = MakeTarget("oracle://localhost:1521/olxp", 1, Isolation::kReadCommitted);
    CHECK(CategoryOf([&] { Connect(t); }) == ErrorCategory::kValidation);
  }
  SUBCASE("embedded accepts every isolation level") {
    for (Isolation i : {Isolation::kReadCommitted, Isolation::kRepeatableRead,
                        Isolation::kSnapshot}) {
      CHECK_NOTHROW(Connect(EmbeddedBackend(1, i)));
    }
  }
  SUBCASE("isolation names round trip") {
    for (Isolation i : {Isolation::kReadCommitted, Isolation::kRepeatableRead,
                        Isolation::kSnapshot}) {
      CHECK(ParseIsolation(IsolationName(i)) == i);
    }
    CHECK_FALSE(ParseIsolation("serializable").has_value());
  }
}

TEST_CASE("subenchmark DDL loads on the embedded backend in both variants") {
  for (bool fk : {false, true}) {
    auto pool = Connect(EmbeddedBackend(1));
    CHECK_NOTHROW(CreateSchema(*pool, *LoadCatalog("subenchmark"), fk));
  }
}

TEST_CASE("statement cache is keyed by SQL text") {
  auto pool = Connect(EmbeddedBackend(1));
  auto lease = pool->Acquire();
  lease->ExecuteScript("CREATE TABLE t (x INTEGER)");
  lease->Execute("INSERT INTO t VALUES (?)", {int64_t{1}});
  lease->Execute("INSERT INTO t VALUES (?)", {int64_t{2}});
  lease->Execute("SELECT x FROM t WHERE x = ?", {int64_t{1}});
  CHECK(lease->CachedStatements() == 2);
  auto r = lease->Execute("SELECT x FROM t ORDER BY x", {});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1][0] == Value{int64_t{2}});
  CHECK_THROWS_AS(lease->Execute("SELECT x FROM t WHERE x = ?", {}), StatementError);
}

TEST_CASE("values round trip through the embedded backend") {
  auto pool = Connect(EmbeddedBackend(1));
  auto lease = pool->Acquire();
  lease->ExecuteScript("CREATE TABLE v (a INTEGER, b FLOAT, c VARCHAR(10), d INTEGER)");
  Row in = {int64_t{-7}, 2.5, std::string("x'y"), std::monostate{}};
  lease->Execute("INSERT INTO v VALUES (?, ?, ?, ?)", in);
  auto r = lease->Execute("SELECT a, b, c, d FROM v", {});
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0] == in);
}

TEST_CASE("transactions") {
  auto pool = Loaded("fibenchmark");
  auto fi = LoadCatalog("fibenchmark");

  SUBCASE("read-only Balance commits and touches rows") {
    Rng rng(1);
    auto inst = Instantiate(*fi, *fi->FindTransaction("Balance"), rng, 1);
    auto out = ExecuteTransaction(*pool, inst);
    CHECK(out.status == OutcomeStatus::kCommitted);
    CHECK(out.rows_touched >= 1);
    CHECK(out.latency_us > 0);
    CHECK(out.latency_us >= out.max_statement_us);
    CHECK(out.attempts == 1);
  }
  SUBCASE("missing table fails with the statement index") {
    TransactionTemplate t;
    t.name = "Broken";
    t.statements.push_back({"SELECT bal FROM SAVING WHERE custid = ?", {"SAVING"}, {},
                            {{"a", ScaledIdGen{"ACCOUNT"}}}});
    t.statements.push_back({"SELECT * FROM NO_SUCH_TABLE", {"NO_SUCH_TABLE"}, {}, {}});
    t.read_only = true;
    Rng rng(1);
    auto inst = Instantiate(*fi, t, rng, 1);
    auto out = ExecuteTransaction(*pool, inst);
    CHECK(out.status == OutcomeStatus::kFailed);
    REQUIRE(out.failed_statement.has_value());
    CHECK(*out.failed_statement == 1);
    CHECK(out.error.find("NO_SUCH_TABLE") != std::string::npos);
    CHECK(out.latency_us > 0);
  }
  SUBCASE("every write transaction commits with one begin and one commit") {
    auto lease = pool->Acquire();
    CountingSession counting(*lease);
    Rng rng(5);
    for (const auto& t : fi->online) {
      auto inst = Instantiate(*fi, t, rng, 1);
      const int begins = counting.begins, commits = counting.commits;
      auto out = ExecuteTransaction(counting, inst);
      CAPTURE(t.name);
      CHECK(out.status == OutcomeStatus::kCommitted);
      CHECK(counting.begins - begins == 1);
      CHECK(counting.commits - commits == 1);
    }
    CHECK(counting.rollbacks == 0);
  }
}

TEST_CASE("hybrid NewOrder with X1 runs inside exactly one transaction") {
  auto pool = Loaded("subenchmark", 1);
  auto su = LoadCatalog("subenchmark");
  const HybridTemplate* x1 = su->FindHybrid("X1");
  Rng rng(42);
  auto inst = Instantiate(*su, *x1, rng, 1);

  auto lease = pool->Acquire();
  const int64_t orders_before = TableRowCount(*lease, "ORDERS");
  CountingSession counting(*lease);
  auto out = ExecuteTransaction(counting, inst);
  CHECK(out.status == OutcomeStatus::kCommitted);
  CHECK(counting.begins == 1);
  CHECK(counting.commits == 1);
  CHECK(counting.rollbacks == 0);
  CHECK(counting.statements == static_cast<int>(inst.statements.size()));
  CHECK(TableRowCount(*lease, "ORDERS") == orders_before + 1);
}

TEST_CASE("fault injected after the real-time query leaves no trace") {
  auto pool = Loaded("subenchmark", 1);
  auto su = LoadCatalog("subenchmark");
  auto lease = pool->Acquire();
  const auto before = CatalogChecksums(*lease, *su);
  Rng rng(7);
  for (const auto& h : su->hybrid) {
    auto inst = Instantiate(*su, h, rng, 1);
    ExecuteOptions opts;
    opts.abort_after_statement = *inst.realtime_index;
    auto out = ExecuteTransaction(*lease, inst, opts);
    CAPTURE(h.name);
    CHECK(out.status == OutcomeStatus::kFailed);
    CHECK(out.failed_statement == inst.realtime_index);
    CHECK_FALSE(lease->InTransaction());
  }
  CHECK(CatalogChecksums(*lease, *su) == before);
}

TEST_CASE("conflicting writers") {
  TempDir dir;
  const std::string desc = "embedded://" + dir.File("conflict.db") + "?busy_timeout_ms=50";
  auto pool = Connect(MakeTarget(desc, 2, Isolation::kRepeatableRead));
  {
    auto s = pool->Acquire();
    s->ExecuteScript("CREATE TABLE counter (id INTEGER PRIMARY KEY, n INTEGER)");
    s->Execute("INSERT INTO counter VALUES (1, 0)", {});
  }
  TransactionTemplate bump;
  bump.name = "Bump";
  bump.statements.push_back({"UPDATE counter SET n = n + 1 WHERE id = 1", {}, {"counter"}, {}});
  BenchmarkCatalog empty;
  Rng rng(1);
  const auto inst = Instantiate(empty, bump, rng, 1);

  SUBCASE("a writer blocked past its timeout aborts retryably; the holder commits") {
    auto a = pool->Acquire();
    auto b = pool->Acquire();
    a->Begin(false);
    a->Execute("UPDATE counter SET n = n + 1 WHERE id = 1", {});
    ExecuteOptions no_retry;
    no_retry.max_retries = 0;
    auto out = ExecuteTransaction(*b, inst, no_retry);
    CHECK(out.status == OutcomeStatus::kAbortedRetryable);
    a->Commit();
    CHECK(std::get<int64_t>(b->Execute("SELECT n FROM counter", {}).rows[0][0]) == 1);
  }
  SUBCASE("separate connections on one file serialize through the file lock") {
    auto other = Connect(MakeTarget(desc, 1, Isolation::kRepeatableRead));
    auto a = pool->Acquire();
    auto b = other->Acquire();
    a->Begin(false);
    a->Execute("UPDATE counter SET n = n + 1 WHERE id = 1", {});
    ExecuteOptions no_retry;
    no_retry.max_retries = 0;
    auto out = ExecuteTransaction(*b, inst, no_retry);
    CHECK(out.status == OutcomeStatus::kAbortedRetryable);
    a->Rollback();
    CHECK(ExecuteTransaction(*b, inst).status == OutcomeStatus::kCommitted);
  }
  SUBCASE("concurrent increments never lose an update") {
    auto roomy = Connect(MakeTarget("embedded://" + dir.File("conflict.db"), 4,
                                    Isolation::kRepeatableRead));
    std::atomic<int> committed{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&] {
        for (int i = 0; i < 50; ++i) {
          if (ExecuteTransaction(*roomy, inst).status == OutcomeStatus::kCommitted) ++committed;
        }
      });
    }
    for (auto& t : threads) t.join();
    auto s = roomy->Acquire();
    CHECK(std::get<int64_t>(s->Execute("SELECT n FROM counter", {}).rows[0][0]) == committed);
    CHECK(committed == 200);
  }
}

TEST_CASE("pool hands sessions to waiters without idling") {
  auto pool = Connect(EmbeddedBackend(2));
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        auto lease = pool->Acquire();
        std::this_thread::sleep_for(std::chrono::microseconds(200));
      }
    });
  }
  for (auto& t : threads) t.join();
  const auto stats = pool->stats();
  CHECK(stats.acquisitions == 400);
  CHECK(stats.waits > 0);
  CHECK(stats.idle_while_waiting == 0);
  CHECK(stats.max_in_use <= 2);
  CHECK(pool->in_use() == 0);
  CHECK(pool->waiting() == 0);
}

TEST_CASE("golden checksums after a deterministic populate") {
  auto pool = Loaded("fibenchmark", 1);
  auto lease = pool->Acquire();
  // Recorded from the first verified load (fibenchmark, scale 1, seed 42).
  const std::map<std::string, uint64_t> golden = {
      {"ACCOUNT", 2885580452467915017ULL},
      {"CHECKING", 1405357733391770317ULL},
      {"SAVING", 1157165362748748105ULL},
  };
  CHECK(CatalogChecksums(*lease, *LoadCatalog("fibenchmark")) == golden);
}
