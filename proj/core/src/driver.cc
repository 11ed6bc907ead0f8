#include "olxp/driver.h"

#include <algorithm>
#include <cctype>
#include <chrono>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "sqlite_backend.h"

namespace olxp {
namespace {

using Clock = std::chrono::steady_clock;

int64_t MicrosSince(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
}

std::string DecodePercent(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

struct Capability {
  const char* scheme;
  std::vector<Isolation> levels;
};

const std::vector<Capability>& Capabilities() {
  static const std::vector<Capability> table = {
      {"memsql", {Isolation::kReadCommitted}},
      {"singlestore", {Isolation::kReadCommitted}},
      {"tidb", {Isolation::kReadCommitted, Isolation::kRepeatableRead}},
      {"oceanbase", {Isolation::kReadCommitted, Isolation::kRepeatableRead}},
      {"mysql", {Isolation::kReadCommitted, Isolation::kRepeatableRead}},
      {"postgresql",
       {Isolation::kReadCommitted, Isolation::kRepeatableRead, Isolation::kSnapshot}},
  };
  return table;
}

}  // namespace

std::string_view IsolationName(Isolation isolation) {
  switch (isolation) {
    case Isolation::kReadCommitted: return "read-committed";
    case Isolation::kRepeatableRead: return "repeatable-read";
    case Isolation::kSnapshot: return "snapshot";
  }
  return "?";
}

std::optional<Isolation> ParseIsolation(std::string_view name) {
  for (Isolation i : {Isolation::kReadCommitted, Isolation::kRepeatableRead, Isolation::kSnapshot}) {
    if (IsolationName(i) == name) return i;
  }
  return std::nullopt;
}

std::string_view OutcomeName(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::kCommitted: return "committed";
    case OutcomeStatus::kAbortedRetryable: return "aborted-retryable";
    case OutcomeStatus::kFailed: return "failed";
  }
  return "?";
}

Descriptor ParseDescriptor(std::string_view text) {
  auto bad = [&](std::string_view why) {
    return Error(ErrorCategory::kValidation,
                 fmt::format("malformed descriptor '{}': {}", text, why));
  };
  const size_t sep = text.find("://");
  if (sep == std::string_view::npos || sep == 0) throw bad("expected <kind>://...");
  Descriptor d;
  d.scheme = std::string(text.substr(0, sep));
  for (char c : d.scheme) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') {
      throw bad("kind must be alphanumeric");
    }
  }
  std::string_view rest = text.substr(sep + 3);
  std::string_view query;
  if (const size_t q = rest.find('?'); q != std::string_view::npos) {
    query = rest.substr(q + 1);
    rest = rest.substr(0, q);
  }
  while (!query.empty()) {
    const size_t amp = query.find('&');
    std::string_view kv = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    if (kv.empty()) continue;
    const size_t eq = kv.find('=');
    if (eq == std::string_view::npos || eq == 0) throw bad(fmt::format("option '{}'", kv));
    d.options[std::string(kv.substr(0, eq))] = DecodePercent(kv.substr(eq + 1));
  }

  if (d.embedded()) {
    d.database = std::string(rest);
    if (auto it = d.options.find("busy_timeout_ms"); it != d.options.end()) {
      try {
        if (std::stoll(it->second) < 0) throw bad("busy_timeout_ms must be >= 0");
      } catch (const std::logic_error&) {
        throw bad("busy_timeout_ms must be an integer");
      }
    }
    return d;
  }

  const size_t slash = rest.find('/');
  if (slash == std::string_view::npos) throw bad("expected host:port/database");
  std::string_view hostport = rest.substr(0, slash);
  d.database = std::string(rest.substr(slash + 1));
  const size_t colon = hostport.rfind(':');
  if (colon == std::string_view::npos) throw bad("expected host:port");
  d.host = std::string(hostport.substr(0, colon));
  if (d.host.empty()) throw bad("empty host");
  try {
    size_t used = 0;
    const std::string port(hostport.substr(colon + 1));
    d.port = std::stoi(port, &used);
    if (used != port.size() || d.port < 1 || d.port > 65535) throw bad("port out of range");
  } catch (const std::logic_error&) {
    throw bad("port must be an integer");
  }
  if (d.database.empty()) throw bad("empty database");
  return d;
}

BackendTarget MakeTarget(std::string_view descriptor, int pool_size, Isolation isolation) {
  BackendTarget t;
  t.descriptor = std::string(descriptor);
  t.kind = ParseDescriptor(descriptor).embedded() ? BackendKind::kEmbedded
                                                  : BackendKind::kExternalSql;
  t.pool_size = pool_size;
  t.isolation = isolation;
  return t;
}

BackendTarget EmbeddedBackend(int pool_size, Isolation isolation) {
  return MakeTarget("embedded://", pool_size, isolation);
}

std::vector<Isolation> SupportedIsolation(std::string_view scheme) {
  if (scheme == "embedded") {
    return {Isolation::kReadCommitted, Isolation::kRepeatableRead, Isolation::kSnapshot};
  }
  for (const auto& c : Capabilities()) {
    if (scheme == c.scheme) return c.levels;
  }
  return {};
}

std::shared_ptr<Pool> Connect(const BackendTarget& target) {
  if (target.pool_size < 1) {
    throw Error(ErrorCategory::kValidation,
                fmt::format("pool_size must be >= 1, got {}", target.pool_size));
  }
  const Descriptor d = ParseDescriptor(target.descriptor);
  if ((target.kind == BackendKind::kEmbedded) != d.embedded()) {
    throw Error(ErrorCategory::kValidation,
                fmt::format("descriptor '{}' does not match the target kind", target.descriptor));
  }
  const auto supported = SupportedIsolation(d.scheme);
  if (supported.empty()) {
    std::vector<std::string> kinds = {"embedded"};
    for (const auto& c : Capabilities()) kinds.emplace_back(c.scheme);
    throw Error(ErrorCategory::kValidation,
                fmt::format("unknown backend kind '{}' (known: {})", d.scheme,
                            fmt::join(kinds, ", ")));
  }
  if (std::find(supported.begin(), supported.end(), target.isolation) == supported.end()) {
    std::vector<std::string_view> names;
    for (Isolation i : supported) names.push_back(IsolationName(i));
    throw Error(ErrorCategory::kUnsupportedIsolation,
                fmt::format("{} does not support {} isolation (supported: {})", d.scheme,
                            IsolationName(target.isolation), fmt::join(names, ", ")));
  }
  if (d.embedded()) return sqlite::Connect(target, d);
  throw Error(ErrorCategory::kBackendUnavailable,
              fmt::format("cannot reach {}:{}: no {} client is built into this binary", d.host,
                          d.port, d.scheme));
}

// ---------------------------------------------------------------------------
// Pool
// ---------------------------------------------------------------------------

Lease::~Lease() {
  if (pool_ != nullptr) pool_->Release(session_);
}

Pool::Pool(BackendTarget target, std::vector<std::unique_ptr<Session>> sessions,
           std::shared_ptr<void> resource)
    : target_(std::move(target)), resource_(std::move(resource)), sessions_(std::move(sessions)) {
  for (auto it = sessions_.rbegin(); it != sessions_.rend(); ++it) free_.push_back(it->get());
}

Pool::~Pool() = default;

Lease Pool::Acquire() {
  std::unique_lock lock(mu_);
  ++stats_.acquisitions;
  if (!free_.empty() && waiters_.empty()) {
    Session* s = free_.back();
    free_.pop_back();
    stats_.max_in_use = std::max(stats_.max_in_use, size() - static_cast<int>(free_.size()));
    return Lease(this, s);
  }
  ++stats_.waits;
  Waiter w;
  waiters_.push_back(&w);
  CheckFairness();
  w.cv.wait(lock, [&] { return w.granted != nullptr; });
  return Lease(this, w.granted);
}

std::optional<Lease> Pool::TryAcquire() {
  std::lock_guard lock(mu_);
  if (free_.empty() || !waiters_.empty()) return std::nullopt;
  ++stats_.acquisitions;
  Session* s = free_.back();
  free_.pop_back();
  stats_.max_in_use = std::max(stats_.max_in_use, size() - static_cast<int>(free_.size()));
  return Lease(this, s);
}

void Pool::Release(Session* session) {
  std::lock_guard lock(mu_);
  if (!waiters_.empty()) {
    Waiter* w = waiters_.front();
    waiters_.pop_front();
    w->granted = session;
    w->cv.notify_one();
  } else {
    free_.push_back(session);
  }
  CheckFairness();
}

void Pool::CheckFairness() {
  if (!free_.empty() && !waiters_.empty()) ++stats_.idle_while_waiting;
}

int Pool::in_use() const {
  std::lock_guard lock(mu_);
  return size() - static_cast<int>(free_.size());
}

int Pool::waiting() const {
  std::lock_guard lock(mu_);
  return static_cast<int>(waiters_.size());
}

PoolStats Pool::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

// ---------------------------------------------------------------------------
// Transactions
// ---------------------------------------------------------------------------

ExecutionOutcome ExecuteTransaction(Session& session, const BoundTransaction& txn,
                                    const ExecuteOptions& options) {
  ExecutionOutcome out;
  const auto start = Clock::now();
  auto rollback = [&] {
    try {
      session.Rollback();
    } catch (const Error&) {
    }
  };

  while (true) {
    ++out.attempts;
    out.rows_touched = 0;
    out.failed_statement.reset();
    out.error.clear();
    std::optional<size_t> current;
    try {
      session.Begin(txn.read_only);
      bool injected = false;
      for (size_t i = 0; i < txn.statements.size(); ++i) {
        current = i;
        const auto t0 = Clock::now();
        QueryResult r = session.Execute(txn.statements[i].sql(), txn.statements[i].params);
        out.max_statement_us = std::max(out.max_statement_us, MicrosSince(t0));
        out.rows_touched += static_cast<int64_t>(r.rows.size()) + r.changes;
        if (options.abort_after_statement == i) {
          injected = true;
          break;
        }
      }
      if (injected) {
        session.Rollback();
        out.status = OutcomeStatus::kFailed;
        out.failed_statement = current;
        out.error = fmt::format("injected abort after statement {}", *current);
        break;
      }
      current.reset();
      session.Commit();
      out.status = OutcomeStatus::kCommitted;
      break;
    } catch (const StatementError& e) {
      rollback();
      out.failed_statement = current;
      out.error = e.what();
      if (e.retryable() && out.attempts <= options.max_retries) continue;
      out.status = e.retryable() ? OutcomeStatus::kAbortedRetryable : OutcomeStatus::kFailed;
      break;
    }
  }
  out.latency_us = std::max<int64_t>(1, MicrosSince(start));
  out.max_statement_us = std::min(out.max_statement_us, out.latency_us);
  return out;
}

ExecutionOutcome ExecuteTransaction(Pool& pool, const BoundTransaction& txn,
                                    const ExecuteOptions& options) {
  Lease lease = pool.Acquire();
  return ExecuteTransaction(*lease, txn, options);
}

// ---------------------------------------------------------------------------
// Checksums and schema
// ---------------------------------------------------------------------------

uint64_t TableChecksum(Session& session, std::string_view table) {
  uint64_t sum = 0;
  for (const Row& row : session.Execute(fmt::format("SELECT * FROM {}", table), {}).rows) {
    sum += HashRow(row);
  }
  return sum;
}

int64_t TableRowCount(Session& session, std::string_view table) {
  auto r = session.Execute(fmt::format("SELECT COUNT(*) FROM {}", table), {});
  return std::get<int64_t>(r.rows.at(0).at(0));
}

std::map<std::string, uint64_t> CatalogChecksums(Session& session,
                                                 const BenchmarkCatalog& catalog) {
  std::map<std::string, uint64_t> out;
  session.Begin(true);
  try {
    for (const auto& t : catalog.tables) out[t.name] = TableChecksum(session, t.name);
    session.Commit();
  } catch (...) {
    session.Rollback();
    throw;
  }
  return out;
}

void CreateSchema(Pool& pool, const BenchmarkCatalog& catalog, bool fk_variant) {
  Lease lease = pool.Acquire();
  lease->Begin(false);
  try {
    for (const auto& stmt : DdlStatements(catalog, fk_variant)) lease->ExecuteScript(stmt);
    lease->Commit();
  } catch (...) {
    lease->Rollback();
    throw;
  }
}

}  // namespace olxp
