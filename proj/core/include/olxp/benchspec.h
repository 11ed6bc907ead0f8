#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "olxp/random.h"
#include "olxp/value.h"

namespace olxp {

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

enum class SqlTypeKind { kInteger, kDecimal, kVarchar, kTimestamp, kFloat };

struct SqlType {
  SqlTypeKind kind = SqlTypeKind::kInteger;
  int precision = 0;  // decimal
  int scale = 0;      // decimal
  int length = 0;     // varchar

  static SqlType Integer() { return {SqlTypeKind::kInteger}; }
  static SqlType Decimal(int p, int s) { return {SqlTypeKind::kDecimal, p, s}; }
  static SqlType Varchar(int n) { return {SqlTypeKind::kVarchar, 0, 0, n}; }
  static SqlType Timestamp() { return {SqlTypeKind::kTimestamp}; }
  static SqlType Float() { return {SqlTypeKind::kFloat}; }

  std::string ToSql() const;
  bool operator==(const SqlType&) const = default;
};

struct ColumnDef {
  std::string name;
  SqlType type;
  bool nullable = false;
};

struct IndexDef {
  std::string name;
  std::vector<std::string> columns;
  bool unique = false;
};

struct ForeignKey {
  std::vector<std::string> columns;
  std::string table;
  std::vector<std::string> foreign_columns;
};

// Initial row count: base rows, multiplied by the scale factor when per_scale.
struct Cardinality {
  int64_t base = 1;
  bool per_scale = false;

  int64_t Rows(int64_t scale) const { return per_scale ? base * scale : base; }
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::vector<std::string> primary_key;  // declaration order preserved
  std::vector<IndexDef> indexes;         // secondary indexes only
  std::vector<ForeignKey> foreign_keys;
  Cardinality cardinality;

  const ColumnDef* FindColumn(std::string_view column) const;
};

// ---------------------------------------------------------------------------
// Parameter generators
// ---------------------------------------------------------------------------

struct UniformIntGen {
  int64_t lo = 0;
  int64_t hi = 0;
  bool operator==(const UniformIntGen&) const = default;
};

// Zipfian over [1, n] (Gray et al. closed form). Build with MakeZipf.
struct ZipfGen {
  int64_t n = 1;
  double theta = 0.99;
  double zetan = 1;
  double alpha = 1;
  double eta = 1;
  bool operator==(const ZipfGen&) const = default;
};

// Uniform over [1, rows(table, scale)]. With zero_pad > 0 the id is rendered
// as a zero-padded decimal string of that width (TATP's sub_nbr).
struct ScaledIdGen {
  std::string table;
  int zero_pad = 0;
  bool operator==(const ScaledIdGen&) const = default;
};

struct StringPatternGen {
  std::string alphabet;
  int min_len = 1;
  int max_len = 1;
  std::string prefix;
  std::string suffix;
  bool operator==(const StringPatternGen&) const = default;
};

struct ConstantGen {
  Value value;
  bool operator==(const ConstantGen&) const = default;
};

// Uniform over [lo, hi], rounded to `digits` fractional digits.
struct UniformDecimalGen {
  double lo = 0;
  double hi = 0;
  int digits = 2;
  bool operator==(const UniformDecimalGen&) const = default;
};

// Uniform second in [lo, hi] (Unix epoch), rendered "YYYY-MM-DD HH:MM:SS".
struct TimestampGen {
  int64_t lo = 0;
  int64_t hi = 0;
  bool operator==(const TimestampGen&) const = default;
};

using Generator = std::variant<UniformIntGen, ZipfGen, ScaledIdGen, StringPatternGen,
                               ConstantGen, UniformDecimalGen, TimestampGen>;

ZipfGen MakeZipf(int64_t n, double theta);

inline constexpr std::string_view kAlphaNumeric =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
inline constexpr std::string_view kDigits = "0123456789";

std::string FormatTimestamp(int64_t epoch_seconds);

// One positional slot. Slots sharing a name within a transaction instance
// receive the same drawn value.
struct ParamSpec {
  std::string name;
  Generator generator;
};

// ---------------------------------------------------------------------------
// Workload templates
// ---------------------------------------------------------------------------

struct StatementTemplate {
  std::string sql;  // positional '?' slots
  std::set<std::string> tables_read;
  std::set<std::string> tables_written;
  std::vector<ParamSpec> params;  // params[i] fills slot i
};

enum class WorkloadClass { kOnline, kAnalytical, kHybrid };

std::string_view ClassName(WorkloadClass cls);  // "oltp" / "olap" / "olxp"
std::optional<WorkloadClass> ParseClassName(std::string_view name);

struct TransactionTemplate {
  std::string name;
  WorkloadClass cls = WorkloadClass::kOnline;  // kOnline or kAnalytical
  bool read_only = false;
  int64_t weight = 0;
  std::vector<StatementTemplate> statements;
};

struct HybridTemplate {
  std::string name;
  TransactionTemplate base;  // class online
  StatementTemplate realtime_query;
  size_t insertion_index = 0;  // realtime query runs before base.statements[insertion_index]
  bool read_only = false;
  int64_t weight = 0;
};

struct BenchmarkCatalog {
  std::string name;
  std::vector<TableDef> tables;
  std::vector<TransactionTemplate> online;
  std::vector<TransactionTemplate> analytical;
  std::vector<HybridTemplate> hybrid;

  const TableDef* FindTable(std::string_view table) const;
  const TransactionTemplate* FindTransaction(std::string_view name) const;
  const HybridTemplate* FindHybrid(std::string_view name) const;
  size_t ColumnCount() const;
  size_t IndexCount() const;
};

// Names of the built-in suites: subenchmark, fibenchmark, tabenchmark.
const std::vector<std::string>& BuiltinBenchmarks();

// Returns the shared immutable catalog; throws kUnknownBenchmark.
std::shared_ptr<const BenchmarkCatalog> LoadCatalog(std::string_view name);

// CH-benCHmark-style stitched schema: the subenchmark online side plus
// SUPPLIER/NATION/REGION that only analytical queries touch.
std::shared_ptr<const BenchmarkCatalog> StitchedFixture();

// Throws kValidation naming the first broken invariant.
void ValidateCatalog(const BenchmarkCatalog& catalog);

// Number of '?' placeholders outside quoted literals.
size_t CountSlots(std::string_view sql);

// ---------------------------------------------------------------------------
// DDL
// ---------------------------------------------------------------------------

// Tables ordered so every FK target precedes its referrers (declaration order
// breaks ties). Throws kUnorderableSchema on a cycle. Self references are
// ignored.
std::vector<const TableDef*> TopologicalOrder(const BenchmarkCatalog& catalog);

// Individual DDL statements (CREATE TABLE ..., CREATE INDEX ...).
std::vector<std::string> DdlStatements(const BenchmarkCatalog& catalog, bool fk_variant);

// The statements joined into one script, one statement per line group.
std::string EmitDdl(const BenchmarkCatalog& catalog, bool fk_variant);

// ---------------------------------------------------------------------------
// Semantic consistency
// ---------------------------------------------------------------------------

struct ConsistencyViolation {
  std::string template_name;
  size_t statement_index = 0;  // within the analytical template, or 0 for realtime
  bool realtime = false;
  std::set<std::string> unwritten_tables;
};

struct ConsistencyReport {
  std::vector<ConsistencyViolation> violations;
  std::set<std::string> unwritten_tables;  // union over violations
  bool pass = true;

  std::string ToText() const;
};

ConsistencyReport CheckSemanticConsistency(const BenchmarkCatalog& catalog);

// ---------------------------------------------------------------------------
// Mixes
// ---------------------------------------------------------------------------

struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  static Rational Make(int64_t num, int64_t den);  // reduced, den > 0
  double ToDouble() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

struct MixEntry {
  std::string name;
  int64_t weight = 0;
  bool read_only = false;
};

// Integer weights; fractions are weight / total, kept exact.
class Mix {
 public:
  Mix() = default;
  explicit Mix(std::vector<MixEntry> entries);

  const std::vector<MixEntry>& entries() const { return entries_; }
  int64_t total() const { return total_; }
  bool empty() const { return total_ == 0; }

  Rational Fraction(std::string_view name) const;
  Rational ReadOnlyMass() const;

  // Index into entries() for a uniform draw in [0, total).
  size_t Pick(int64_t draw) const;
  size_t Pick(Rng& rng) const { return Pick(rng.UniformInt(0, total_ - 1)); }

 private:
  std::vector<MixEntry> entries_;
  std::vector<int64_t> cumulative_;
  int64_t total_ = 0;
};

Mix DefaultMix(const BenchmarkCatalog& catalog, WorkloadClass cls);

// ---------------------------------------------------------------------------
// Instantiation
// ---------------------------------------------------------------------------

struct BoundStatement {
  const StatementTemplate* source = nullptr;  // owned by the catalog
  std::vector<Value> params;
  bool realtime = false;

  const std::string& sql() const { return source->sql; }
};

struct BoundTransaction {
  std::string name;
  WorkloadClass cls = WorkloadClass::kOnline;
  bool read_only = false;
  std::vector<BoundStatement> statements;
  std::optional<size_t> realtime_index;
};

bool SameBindings(const BoundTransaction& a, const BoundTransaction& b);

// Draws one value from a generator (exposed for datagen and tests).
Value Draw(const Generator& generator, Rng& rng, const BenchmarkCatalog& catalog, int64_t scale);

// Binds every slot. Throws kValidation when scale < 1. The returned instance
// refers to templates inside `catalog`, which must outlive it.
BoundTransaction Instantiate(const BenchmarkCatalog& catalog, const TransactionTemplate& tmpl,
                             Rng& rng, int64_t scale);
BoundTransaction Instantiate(const BenchmarkCatalog& catalog, const HybridTemplate& tmpl, Rng& rng,
                             int64_t scale);

// JSON listing of tables and templates.
std::string InventoryJson(const BenchmarkCatalog& catalog);

}  // namespace olxp
