#include "sqlite_backend.h"

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>
#include <sqlite3.h>

namespace olxp::sqlite {
namespace {

constexpr int kDefaultBusyTimeoutMs = 10000;

// State shared by all sessions of one pool.
struct Shared {
  std::string path;
  bool temporary = false;
  int busy_timeout_ms = kDefaultBusyTimeoutMs;
  // Writers queue here instead of polling SQLite's file lock.
  std::timed_mutex writer;

  ~Shared() {
    if (!temporary) return;
    std::error_code ec;
    for (const char* suffix : {"", "-wal", "-shm", "-journal"}) {
      std::filesystem::remove(path + suffix, ec);
    }
  }
};

bool Retryable(int rc) {
  const int primary = rc & 0xff;
  return primary == SQLITE_BUSY || primary == SQLITE_LOCKED;
}

// Spins with short sleeps; the stock handler backs off to 100 ms naps, which
// would dominate measured latency.
int BusyHandler(void* arg, int count) {
  thread_local std::chrono::steady_clock::time_point started;
  const auto now = std::chrono::steady_clock::now();
  if (count == 0) started = now;
  const auto* shared = static_cast<const Shared*>(arg);
  if (now - started > std::chrono::milliseconds(shared->busy_timeout_ms)) return 0;
  std::this_thread::sleep_for(std::chrono::microseconds(count < 10 ? 20 : 200));
  return 1;
}

class SqliteSession final : public Session {
 public:
  SqliteSession(std::shared_ptr<Shared> shared) : shared_(std::move(shared)) {
    const int rc = sqlite3_open_v2(shared_->path.c_str(), &db_,
                                   SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE |
                                       SQLITE_OPEN_NOMUTEX,
                                   nullptr);
    if (rc != SQLITE_OK) {
      std::string msg = db_ != nullptr ? sqlite3_errmsg(db_) : sqlite3_errstr(rc);
      sqlite3_close_v2(db_);
      db_ = nullptr;
      throw Error(ErrorCategory::kBackendUnavailable,
                  fmt::format("cannot open {}: {}", shared_->path, msg));
    }
    sqlite3_busy_handler(db_, BusyHandler, shared_.get());
    Exec("PRAGMA journal_mode=WAL");
    Exec("PRAGMA synchronous=NORMAL");
    Exec("PRAGMA foreign_keys=ON");
    Exec("PRAGMA cache_size=-16384");
    Exec("PRAGMA temp_store=MEMORY");
  }

  ~SqliteSession() override {
    if (db_ == nullptr) return;
    if (InTransaction()) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
    ReleaseWriter();
    for (auto& [sql, stmt] : cache_) sqlite3_finalize(stmt);
    sqlite3_close_v2(db_);
  }

  void Begin(bool read_only) override {
    if (InTransaction()) throw StatementError("transaction already open", false);
    if (read_only) {
      Exec("BEGIN");
      return;
    }
    if (!shared_->writer.try_lock_for(std::chrono::milliseconds(shared_->busy_timeout_ms))) {
      throw StatementError("timed out waiting for the write lock", true);
    }
    holds_writer_ = true;
    try {
      Exec("BEGIN IMMEDIATE");
    } catch (...) {
      ReleaseWriter();
      throw;
    }
  }

  void Commit() override {
    Exec("COMMIT");
    ReleaseWriter();
  }

  void Rollback() override {
    if (InTransaction()) {
      const int rc = sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
      if (rc != SQLITE_OK && InTransaction()) {
        ReleaseWriter();
        Fail(rc);
      }
    }
    ReleaseWriter();
  }

  bool InTransaction() const override { return sqlite3_get_autocommit(db_) == 0; }

  QueryResult Execute(const std::string& sql, const std::vector<Value>& params) override {
    sqlite3_stmt* stmt = Prepare(sql);
    const int slots = sqlite3_bind_parameter_count(stmt);
    if (slots != static_cast<int>(params.size())) {
      throw StatementError(
          fmt::format("statement has {} slots but {} parameters were bound", slots, params.size()),
          false);
    }
    for (int i = 0; i < slots; ++i) Bind(stmt, i + 1, params[i]);

    QueryResult result;
    const int columns = sqlite3_column_count(stmt);
    int rc;
    while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
      Row row;
      row.reserve(columns);
      for (int c = 0; c < columns; ++c) row.push_back(Column(stmt, c));
      result.rows.push_back(std::move(row));
    }
    if (rc != SQLITE_DONE) {
      const int code = sqlite3_extended_errcode(db_);
      std::string msg = sqlite3_errmsg(db_);
      sqlite3_reset(stmt);
      sqlite3_clear_bindings(stmt);
      throw StatementError(msg, Retryable(code));
    }
    if (!sqlite3_stmt_readonly(stmt)) result.changes = sqlite3_changes(db_);
    sqlite3_reset(stmt);
    sqlite3_clear_bindings(stmt);
    return result;
  }

  void ExecuteScript(const std::string& sql) override { Exec(sql.c_str()); }

  size_t CachedStatements() const override { return cache_.size(); }

 private:
  void Exec(const char* sql) {
    char* err = nullptr;
    const int rc = sqlite3_exec(db_, sql, nullptr, nullptr, &err);
    if (rc != SQLITE_OK) {
      std::string msg = err != nullptr ? err : sqlite3_errstr(rc);
      sqlite3_free(err);
      throw StatementError(msg, Retryable(sqlite3_extended_errcode(db_)));
    }
  }

  [[noreturn]] void Fail(int rc) {
    throw StatementError(sqlite3_errmsg(db_), Retryable(rc));
  }

  void ReleaseWriter() {
    if (holds_writer_) {
      holds_writer_ = false;
      shared_->writer.unlock();
    }
  }

  sqlite3_stmt* Prepare(const std::string& sql) {
    if (auto it = cache_.find(sql); it != cache_.end()) return it->second;
    sqlite3_stmt* stmt = nullptr;
    const int rc = sqlite3_prepare_v3(db_, sql.data(), static_cast<int>(sql.size()),
                                      SQLITE_PREPARE_PERSISTENT, &stmt, nullptr);
    if (rc != SQLITE_OK) {
      std::string msg = sqlite3_errmsg(db_);
      sqlite3_finalize(stmt);
      throw StatementError(msg, Retryable(rc));
    }
    if (stmt == nullptr) throw StatementError("empty statement", false);
    cache_.emplace(sql, stmt);
    return stmt;
  }

  static void Bind(sqlite3_stmt* stmt, int slot, const Value& v) {
    if (const auto* i = std::get_if<int64_t>(&v)) {
      sqlite3_bind_int64(stmt, slot, *i);
    } else if (const auto* d = std::get_if<double>(&v)) {
      sqlite3_bind_double(stmt, slot, *d);
    } else if (const auto* s = std::get_if<std::string>(&v)) {
      sqlite3_bind_text(stmt, slot, s->data(), static_cast<int>(s->size()), SQLITE_TRANSIENT);
    } else {
      sqlite3_bind_null(stmt, slot);
    }
  }

  static Value Column(sqlite3_stmt* stmt, int c) {
    switch (sqlite3_column_type(stmt, c)) {
      case SQLITE_INTEGER: return static_cast<int64_t>(sqlite3_column_int64(stmt, c));
      case SQLITE_FLOAT: return sqlite3_column_double(stmt, c);
      case SQLITE_NULL: return std::monostate{};
      default: {
        const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(stmt, c));
        return std::string(text, static_cast<size_t>(sqlite3_column_bytes(stmt, c)));
      }
    }
  }

  std::shared_ptr<Shared> shared_;
  sqlite3* db_ = nullptr;
  std::unordered_map<std::string, sqlite3_stmt*> cache_;
  bool holds_writer_ = false;
};

std::string MakeTempPath() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "olxp-XXXXXX").string();
  const int fd = mkstemp(tmpl.data());
  if (fd < 0) {
    throw Error(ErrorCategory::kBackendUnavailable, "cannot create a temporary database file");
  }
  close(fd);
  return tmpl;
}

}  // namespace

std::shared_ptr<Pool> Connect(const BackendTarget& target, const Descriptor& descriptor) {
  auto shared = std::make_shared<Shared>();
  if (descriptor.database.empty()) {
    shared->path = MakeTempPath();
    shared->temporary = true;
  } else {
    shared->path = descriptor.database;
  }
  if (auto it = descriptor.options.find("busy_timeout_ms"); it != descriptor.options.end()) {
    shared->busy_timeout_ms = std::stoi(it->second);
  }
  std::vector<std::unique_ptr<Session>> sessions;
  for (int i = 0; i < target.pool_size; ++i) {
    sessions.push_back(std::make_unique<SqliteSession>(shared));
  }
  return std::make_shared<Pool>(target, std::move(sessions), shared);
}

}  // namespace olxp::sqlite
