#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "olxp/driver.h"

namespace olxp::testing {

// A scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "olxp-test-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string File(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Session decorator that counts transaction demarcations.
class CountingSession : public Session {
 public:
  explicit CountingSession(Session& inner) : inner_(inner) {}

  void Begin(bool read_only) override {
    ++begins;
    inner_.Begin(read_only);
  }
  void Commit() override {
    ++commits;
    inner_.Commit();
  }
  void Rollback() override {
    ++rollbacks;
    inner_.Rollback();
  }
  bool InTransaction() const override { return inner_.InTransaction(); }
  QueryResult Execute(const std::string& sql, const std::vector<Value>& params) override {
    ++statements;
    return inner_.Execute(sql, params);
  }
  void ExecuteScript(const std::string& sql) override { inner_.ExecuteScript(sql); }
  size_t CachedStatements() const override { return inner_.CachedStatements(); }

  int begins = 0;
  int commits = 0;
  int rollbacks = 0;
  int statements = 0;

 private:
  Session& inner_;
};

}  // namespace olxp::testing
