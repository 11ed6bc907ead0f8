#pragma once

// Built-in suite definitions and the small builder DSL they share.

#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "olxp/benchspec.h"

namespace olxp::suites {

BenchmarkCatalog Subenchmark();
BenchmarkCatalog Fibenchmark();
BenchmarkCatalog Tabenchmark();
BenchmarkCatalog Stitched();

// Per-suite base cardinalities.
inline constexpr int64_t kItems = 100000;
inline constexpr int64_t kDistrictsPerWarehouse = 10;
inline constexpr int64_t kCustomersPerDistrict = 3000;
inline constexpr int64_t kOrdersPerDistrict = 3000;
inline constexpr int64_t kFirstUndeliveredOrder = 2101;
inline constexpr int64_t kLinesPerOrder = 5;
inline constexpr int64_t kAccountsPerScale = 10000;
inline constexpr int64_t kSubscribersPerScale = 10000;
inline constexpr int64_t kAccessInfoPerSubscriber = 2;
inline constexpr int64_t kFacilitiesPerSubscriber = 2;

using TableSet = std::initializer_list<const char*>;

inline ColumnDef Col(std::string name, SqlType type, bool nullable = false) {
  return {std::move(name), type, nullable};
}

// Builds one transaction (or a real-time query) against a table of named
// parameter generators. Statement slots name their parameters in order.
class TxnBuilder {
 public:
  TxnBuilder(std::string name, WorkloadClass cls, int64_t weight) {
    tmpl_.name = std::move(name);
    tmpl_.cls = cls;
    tmpl_.weight = weight;
  }

  TxnBuilder& Var(const std::string& name, Generator g) {
    vars_[name] = std::move(g);
    return *this;
  }

  TxnBuilder& Stmt(std::string sql, TableSet reads, TableSet writes,
                   std::initializer_list<const char*> params = {}) {
    tmpl_.statements.push_back(MakeStatement(std::move(sql), reads, writes, params));
    return *this;
  }

  StatementTemplate MakeStatement(std::string sql, TableSet reads, TableSet writes,
                                  std::initializer_list<const char*> params = {}) const {
    StatementTemplate s;
    s.sql = std::move(sql);
    for (const char* t : reads) s.tables_read.insert(t);
    for (const char* t : writes) s.tables_written.insert(t);
    for (const char* p : params) s.params.push_back({p, vars_.at(p)});
    return s;
  }

  TransactionTemplate Build() const {
    TransactionTemplate t = tmpl_;
    t.read_only = true;
    for (const auto& s : t.statements) {
      if (!s.tables_written.empty()) t.read_only = false;
    }
    return t;
  }

 private:
  TransactionTemplate tmpl_;
  std::map<std::string, Generator> vars_;
};

// A hybrid: base transaction plus a read-only real-time query whose
// parameters may share names with the base's.
inline HybridTemplate MakeHybrid(std::string name, const TransactionTemplate& base,
                                 size_t insertion_index, int64_t weight, StatementTemplate query) {
  HybridTemplate h;
  h.name = std::move(name);
  h.base = base;
  h.base.weight = 0;
  h.realtime_query = std::move(query);
  h.insertion_index = insertion_index;
  h.read_only = base.read_only;
  h.weight = weight;
  return h;
}

}  // namespace olxp::suites
