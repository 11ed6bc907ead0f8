#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "olxp/benchspec.h"
#include "olxp/driver.h"

namespace olxp {

struct TableCount {
  std::string table;
  int64_t rows = 0;
};

// Initial row counts in catalog declaration order. Throws kValidation when
// scale < 1.
std::vector<TableCount> Population(const BenchmarkCatalog& catalog, int64_t scale);

// Row i of a table is a pure function of (seed, table, i, scale).
struct TablePlan {
  const TableDef* table = nullptr;
  int64_t rows = 0;
  std::function<Row(int64_t index, Rng& rng)> make;
};

class PopulationPlan {
 public:
  PopulationPlan(const BenchmarkCatalog& catalog, int64_t scale, uint64_t seed);

  // Tables in load order: every FK target before its referrers.
  const std::vector<TablePlan>& tables() const { return tables_; }
  Row Generate(const TablePlan& table, int64_t index) const;
  uint64_t seed() const { return seed_; }
  int64_t scale() const { return scale_; }

 private:
  uint64_t seed_;
  int64_t scale_;
  std::vector<TablePlan> tables_;
};

struct PopulateOptions {
  int64_t batch_size = 1000;  // rows per transaction
};

struct TableLoad {
  std::string table;
  int64_t rows = 0;
  double seconds = 0;
};

struct LoadSummary {
  std::vector<TableLoad> tables;
  int64_t total_rows = 0;
  double seconds = 0;

  double RowsPerSecond() const { return seconds > 0 ? total_rows / seconds : 0; }
  std::string ToText() const;
  std::string ToJson() const;
};

// Loads every table of an already created, empty schema. Errors:
// kPrecondition for a non-empty table, kLoad naming table and batch offset.
LoadSummary Populate(const BenchmarkCatalog& catalog, int64_t scale, uint64_t seed, Pool& pool,
                     const PopulateOptions& options = {});

}  // namespace olxp
