#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olxp/benchspec.h"
#include "olxp/error.h"
#include "olxp/value.h"

namespace olxp {

enum class BackendKind { kEmbedded, kExternalSql };

enum class Isolation { kReadCommitted, kRepeatableRead, kSnapshot };

std::string_view IsolationName(Isolation isolation);  // "read-committed", ...
std::optional<Isolation> ParseIsolation(std::string_view name);

struct BackendTarget {
  BackendKind kind = BackendKind::kEmbedded;
  std::string descriptor = "embedded://";
  int pool_size = 1;
  Isolation isolation = Isolation::kRepeatableRead;
};

// Parsed connection descriptor.
//   external: kind://host:port/database?user=&pass=
//   embedded: embedded://path[?busy_timeout_ms=N]   (empty path: private temp file)
struct Descriptor {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string database;  // external database name, or the embedded file path
  std::map<std::string, std::string> options;

  bool embedded() const { return scheme == "embedded"; }
};

// Throws kValidation on malformed input.
Descriptor ParseDescriptor(std::string_view descriptor);

// Builds a target from a descriptor string (kind inferred from its scheme).
BackendTarget MakeTarget(std::string_view descriptor, int pool_size, Isolation isolation);

// A target for the in-process reference backend. Its descriptor has no path,
// so every Connect gets a private temp database removed when the pool closes.
BackendTarget EmbeddedBackend(int pool_size = 4, Isolation isolation = Isolation::kRepeatableRead);

// Isolation levels an external kind supports; empty for unknown kinds.
std::vector<Isolation> SupportedIsolation(std::string_view scheme);

// Thrown by Session methods. Retryable errors are lock or serialization
// conflicts; everything else is a plain failure.
class StatementError : public Error {
 public:
  StatementError(const std::string& message, bool retryable)
      : Error(ErrorCategory::kBackend, message), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

struct QueryResult {
  std::vector<Row> rows;
  int64_t changes = 0;  // rows inserted/updated/deleted
};

// One connection. Used by a single thread at a time.
class Session {
 public:
  virtual ~Session() = default;

  virtual void Begin(bool read_only) = 0;
  virtual void Commit() = 0;
  virtual void Rollback() = 0;
  virtual bool InTransaction() const = 0;

  // Prepared once per distinct SQL text, then reused.
  virtual QueryResult Execute(const std::string& sql, const std::vector<Value>& params) = 0;

  // Runs a multi-statement script outside the statement cache.
  virtual void ExecuteScript(const std::string& sql) = 0;

  virtual size_t CachedStatements() const = 0;
};

struct PoolStats {
  int64_t acquisitions = 0;
  int64_t waits = 0;  // acquisitions that had to queue
  int64_t idle_while_waiting = 0;  // observed states with a free session and a queued request
  int max_in_use = 0;
};

class Pool;

// RAII handle on one pooled session.
class Lease {
 public:
  Lease(Lease&& other) noexcept : pool_(other.pool_), session_(other.session_) {
    other.pool_ = nullptr;
    other.session_ = nullptr;
  }
  Lease& operator=(Lease&&) = delete;
  Lease(const Lease&) = delete;
  ~Lease();

  Session& operator*() const { return *session_; }
  Session* operator->() const { return session_; }

 private:
  friend class Pool;
  Lease(Pool* pool, Session* session) : pool_(pool), session_(session) {}
  Pool* pool_;
  Session* session_;
};

// Fixed-size session pool. Release hands a session straight to the oldest
// waiter, so a session never sits free while a request is queued.
class Pool {
 public:
  Pool(BackendTarget target, std::vector<std::unique_ptr<Session>> sessions,
       std::shared_ptr<void> resource = nullptr);
  ~Pool();
  Pool(const Pool&) = delete;
  Pool& operator=(const Pool&) = delete;

  Lease Acquire();
  std::optional<Lease> TryAcquire();

  int size() const { return static_cast<int>(sessions_.size()); }
  int in_use() const;
  int waiting() const;
  PoolStats stats() const;
  const BackendTarget& target() const { return target_; }

 private:
  friend class Lease;
  struct Waiter {
    Session* granted = nullptr;
    std::condition_variable cv;
  };
  void Release(Session* session);
  void CheckFairness();  // mu_ held

  BackendTarget target_;
  std::shared_ptr<void> resource_;  // outlives the sessions
  std::vector<std::unique_ptr<Session>> sessions_;

  mutable std::mutex mu_;
  std::vector<Session*> free_;
  std::deque<Waiter*> waiters_;
  PoolStats stats_;
};

// Opens pool_size sessions at the requested isolation. Errors:
// kValidation (pool_size < 1, malformed descriptor), kUnsupportedIsolation
// (lists the supported set), kBackendUnavailable.
std::shared_ptr<Pool> Connect(const BackendTarget& target);

// ---------------------------------------------------------------------------
// Transactions
// ---------------------------------------------------------------------------

enum class OutcomeStatus { kCommitted, kAbortedRetryable, kFailed };

std::string_view OutcomeName(OutcomeStatus status);

struct ExecutionOutcome {
  OutcomeStatus status = OutcomeStatus::kFailed;
  int64_t rows_touched = 0;
  int64_t latency_us = 0;  // begin of first attempt to commit ack of the last, >= 1
  int64_t max_statement_us = 0;
  int attempts = 0;
  std::optional<size_t> failed_statement;
  std::string error;
};

struct ExecuteOptions {
  int max_retries = 3;
  // Fault injection: roll back right after this statement index succeeds.
  std::optional<size_t> abort_after_statement;
};

// One BEGIN, every statement in order, one COMMIT (or ROLLBACK).
ExecutionOutcome ExecuteTransaction(Session& session, const BoundTransaction& txn,
                                    const ExecuteOptions& options = {});
ExecutionOutcome ExecuteTransaction(Pool& pool, const BoundTransaction& txn,
                                    const ExecuteOptions& options = {});

// ---------------------------------------------------------------------------
// Checksums
// ---------------------------------------------------------------------------

// Order-independent: sum of per-row hashes mod 2^64.
uint64_t TableChecksum(Session& session, std::string_view table);
int64_t TableRowCount(Session& session, std::string_view table);
std::map<std::string, uint64_t> CatalogChecksums(Session& session,
                                                 const BenchmarkCatalog& catalog);

// Creates the catalog's schema on the backend.
void CreateSchema(Pool& pool, const BenchmarkCatalog& catalog, bool fk_variant);

}  // namespace olxp
