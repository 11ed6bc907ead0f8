#include "olxp/benchspec.h"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <map>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "olxp/error.h"
#include "suites.h"

namespace olxp {
namespace {

[[noreturn]] void Invalid(const std::string& message) {
  throw Error(ErrorCategory::kValidation, message);
}

std::string JoinColumns(const std::vector<std::string>& columns) {
  return fmt::format("{}", fmt::join(columns, ", "));
}

}  // namespace

std::string SqlType::ToSql() const {
  switch (kind) {
    case SqlTypeKind::kInteger: return "INTEGER";
    case SqlTypeKind::kDecimal: return fmt::format("DECIMAL({},{})", precision, scale);
    case SqlTypeKind::kVarchar: return fmt::format("VARCHAR({})", length);
    case SqlTypeKind::kTimestamp: return "TIMESTAMP";
    case SqlTypeKind::kFloat: return "FLOAT";
  }
  return "INTEGER";
}

const ColumnDef* TableDef::FindColumn(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

const TableDef* BenchmarkCatalog::FindTable(std::string_view table) const {
  for (const auto& t : tables) {
    if (t.name == table) return &t;
  }
  return nullptr;
}

const TransactionTemplate* BenchmarkCatalog::FindTransaction(std::string_view name) const {
  for (const auto* list : {&online, &analytical}) {
    for (const auto& t : *list) {
      if (t.name == name) return &t;
    }
  }
  return nullptr;
}

const HybridTemplate* BenchmarkCatalog::FindHybrid(std::string_view name) const {
  for (const auto& h : hybrid) {
    if (h.name == name) return &h;
  }
  return nullptr;
}

size_t BenchmarkCatalog::ColumnCount() const {
  size_t n = 0;
  for (const auto& t : tables) n += t.columns.size();
  return n;
}

size_t BenchmarkCatalog::IndexCount() const {
  size_t n = 0;
  for (const auto& t : tables) n += t.indexes.size();
  return n;
}

std::string_view ClassName(WorkloadClass cls) {
  switch (cls) {
    case WorkloadClass::kOnline: return "oltp";
    case WorkloadClass::kAnalytical: return "olap";
    case WorkloadClass::kHybrid: return "olxp";
  }
  return "oltp";
}

std::optional<WorkloadClass> ParseClassName(std::string_view name) {
  if (name == "oltp" || name == "online") return WorkloadClass::kOnline;
  if (name == "olap" || name == "analytical") return WorkloadClass::kAnalytical;
  if (name == "olxp" || name == "hybrid") return WorkloadClass::kHybrid;
  return std::nullopt;
}

ZipfGen MakeZipf(int64_t n, double theta) {
  if (n < 1) Invalid("zipf: n must be >= 1");
  if (!(theta > 0 && theta < 1)) Invalid("zipf: theta must be in (0, 1)");
  ZipfGen z;
  z.n = n;
  z.theta = theta;
  double zetan = 0;
  for (int64_t i = 1; i <= n; ++i) zetan += 1.0 / std::pow(static_cast<double>(i), theta);
  const double zeta2 = 1.0 + 1.0 / std::pow(2.0, theta);
  z.zetan = zetan;
  z.alpha = 1.0 / (1.0 - theta);
  z.eta = (1.0 - std::pow(2.0 / static_cast<double>(n), 1.0 - theta)) / (1.0 - zeta2 / zetan);
  return z;
}

std::string FormatTimestamp(int64_t epoch_seconds) {
  std::time_t t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:04}-{:02}-{:02} {:02}:{:02}:{:02}", tm.tm_year + 1900, tm.tm_mon + 1,
                     tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& BuiltinBenchmarks() {
  static const std::vector<std::string> names = {"subenchmark", "fibenchmark", "tabenchmark"};
  return names;
}

std::shared_ptr<const BenchmarkCatalog> LoadCatalog(std::string_view name) {
  static const auto su = std::make_shared<const BenchmarkCatalog>(suites::Subenchmark());
  static const auto fi = std::make_shared<const BenchmarkCatalog>(suites::Fibenchmark());
  static const auto ta = std::make_shared<const BenchmarkCatalog>(suites::Tabenchmark());
  if (name == "subenchmark") return su;
  if (name == "fibenchmark") return fi;
  if (name == "tabenchmark") return ta;
  throw Error(ErrorCategory::kUnknownBenchmark,
              fmt::format("unknown benchmark '{}' (valid: {})", name,
                          fmt::join(BuiltinBenchmarks(), ", ")));
}

std::shared_ptr<const BenchmarkCatalog> StitchedFixture() {
  static const auto stitched = std::make_shared<const BenchmarkCatalog>(suites::Stitched());
  return stitched;
}

size_t CountSlots(std::string_view sql) {
  size_t n = 0;
  char quote = 0;
  for (char c : sql) {
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '?') {
      ++n;
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void ValidateTable(const BenchmarkCatalog& catalog, const TableDef& t) {
  if (t.name.empty()) Invalid("table with empty name");
  if (t.columns.empty()) Invalid(fmt::format("table {} has no columns", t.name));
  std::set<std::string> seen;
  for (const auto& c : t.columns) {
    if (c.name.empty()) Invalid(fmt::format("table {} has a column with empty name", t.name));
    if (!seen.insert(c.name).second) {
      Invalid(fmt::format("table {}: duplicate column {}", t.name, c.name));
    }
  }
  auto require_columns = [&](const TableDef& owner, const std::vector<std::string>& cols,
                             std::string_view what) {
    for (const auto& c : cols) {
      if (!owner.FindColumn(c)) {
        Invalid(fmt::format("table {}: {} references unknown column {}.{}", t.name, what,
                            owner.name, c));
      }
    }
  };
  require_columns(t, t.primary_key, "primary key");
  for (const auto& idx : t.indexes) {
    if (idx.columns.empty()) Invalid(fmt::format("index {} has no columns", idx.name));
    require_columns(t, idx.columns, "index " + idx.name);
  }
  for (const auto& fk : t.foreign_keys) {
    const TableDef* target = catalog.FindTable(fk.table);
    if (!target) {
      Invalid(fmt::format("table {}: foreign key target {} is not in the catalog", t.name,
                          fk.table));
    }
    if (fk.columns.empty() || fk.columns.size() != fk.foreign_columns.size()) {
      Invalid(fmt::format("table {}: foreign key to {} has mismatched arity", t.name, fk.table));
    }
    require_columns(t, fk.columns, "foreign key");
    require_columns(*target, fk.foreign_columns, "foreign key");
  }
  if (t.cardinality.base < 1) Invalid(fmt::format("table {}: cardinality must be >= 1", t.name));
}

void ValidateStatement(const BenchmarkCatalog& catalog, const std::string& owner,
                       const StatementTemplate& s, std::map<std::string, Generator>& vars) {
  const size_t slots = CountSlots(s.sql);
  if (slots != s.params.size()) {
    Invalid(fmt::format("{}: statement has {} slots but {} parameter specs: {}", owner, slots,
                        s.params.size(), s.sql));
  }
  if (s.tables_read.empty() && s.tables_written.empty()) {
    Invalid(fmt::format("{}: statement touches no tables: {}", owner, s.sql));
  }
  for (const auto* set : {&s.tables_read, &s.tables_written}) {
    for (const auto& table : *set) {
      if (!catalog.FindTable(table)) {
        Invalid(fmt::format("{}: statement references unknown table {}", owner, table));
      }
    }
  }
  for (const auto& p : s.params) {
    if (const auto* id = std::get_if<ScaledIdGen>(&p.generator)) {
      if (!catalog.FindTable(id->table)) {
        Invalid(fmt::format("{}: scaled-id parameter over unknown table {}", owner, id->table));
      }
    }
    if (const auto* u = std::get_if<UniformIntGen>(&p.generator); u && u->lo > u->hi) {
      Invalid(fmt::format("{}: empty uniform range for parameter {}", owner, p.name));
    }
    if (p.name.empty()) continue;
    auto [it, inserted] = vars.emplace(p.name, p.generator);
    if (!inserted && !(it->second == p.generator)) {
      Invalid(fmt::format("{}: parameter {} bound to two different generators", owner, p.name));
    }
  }
}

bool AllReadOnly(const std::vector<StatementTemplate>& statements) {
  return std::all_of(statements.begin(), statements.end(),
                     [](const StatementTemplate& s) { return s.tables_written.empty(); });
}

void ValidateTransaction(const BenchmarkCatalog& catalog, const TransactionTemplate& t,
                         WorkloadClass expected, std::map<std::string, Generator>& vars) {
  if (t.name.empty()) Invalid("template with empty name");
  if (t.cls != expected) {
    Invalid(fmt::format("template {} has class {}, expected {}", t.name, ClassName(t.cls),
                        ClassName(expected)));
  }
  if (t.weight < 0) Invalid(fmt::format("template {} has negative weight", t.name));
  if (t.statements.empty()) Invalid(fmt::format("template {} has no statements", t.name));
  for (const auto& s : t.statements) ValidateStatement(catalog, t.name, s, vars);
  if (t.read_only != AllReadOnly(t.statements)) {
    Invalid(fmt::format("template {}: read_only flag disagrees with its statements", t.name));
  }
}

}  // namespace

void ValidateCatalog(const BenchmarkCatalog& catalog) {
  std::set<std::string> names;
  for (const auto& t : catalog.tables) {
    if (!names.insert(t.name).second) Invalid(fmt::format("duplicate table {}", t.name));
  }
  std::set<std::string> index_names;
  for (const auto& t : catalog.tables) {
    ValidateTable(catalog, t);
    for (const auto& idx : t.indexes) {
      if (!index_names.insert(idx.name).second) Invalid(fmt::format("duplicate index {}", idx.name));
    }
  }
  std::set<std::string> template_names;
  auto claim = [&](const std::string& name) {
    if (!template_names.insert(name).second) Invalid(fmt::format("duplicate template {}", name));
  };
  for (const auto& t : catalog.online) {
    claim(t.name);
    std::map<std::string, Generator> vars;
    ValidateTransaction(catalog, t, WorkloadClass::kOnline, vars);
  }
  for (const auto& t : catalog.analytical) {
    claim(t.name);
    std::map<std::string, Generator> vars;
    ValidateTransaction(catalog, t, WorkloadClass::kAnalytical, vars);
    if (!t.read_only) Invalid(fmt::format("analytical template {} writes", t.name));
  }
  for (const auto& h : catalog.hybrid) {
    claim(h.name);
    std::map<std::string, Generator> vars;
    ValidateTransaction(catalog, h.base, WorkloadClass::kOnline, vars);
    ValidateStatement(catalog, h.name, h.realtime_query, vars);
    if (h.weight < 0) Invalid(fmt::format("hybrid {} has negative weight", h.name));
    if (h.insertion_index > h.base.statements.size()) {
      Invalid(fmt::format("hybrid {}: insertion index {} past end of {} statements", h.name,
                          h.insertion_index, h.base.statements.size()));
    }
    if (!h.realtime_query.tables_written.empty()) {
      Invalid(fmt::format("hybrid {}: real-time query writes", h.name));
    }
    if (h.read_only != h.base.read_only) {
      Invalid(fmt::format("hybrid {}: read_only differs from its base transaction", h.name));
    }
  }
  TopologicalOrder(catalog);
}

// ---------------------------------------------------------------------------
// DDL

std::vector<const TableDef*> TopologicalOrder(const BenchmarkCatalog& catalog) {
  const size_t n = catalog.tables.size();
  std::map<std::string, size_t> position;
  for (size_t i = 0; i < n; ++i) position[catalog.tables[i].name] = i;

  std::vector<std::set<size_t>> depends_on(n);
  for (size_t i = 0; i < n; ++i) {
    for (const auto& fk : catalog.tables[i].foreign_keys) {
      auto it = position.find(fk.table);
      if (it == position.end()) {
        throw Error(ErrorCategory::kValidation,
                    fmt::format("table {}: foreign key target {} is not in the catalog",
                                catalog.tables[i].name, fk.table));
      }
      if (it->second != i) depends_on[i].insert(it->second);
    }
  }
  std::vector<const TableDef*> order;
  std::vector<bool> placed(n, false);
  while (order.size() < n) {
    bool progress = false;
    for (size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      const bool ready = std::all_of(depends_on[i].begin(), depends_on[i].end(),
                                     [&](size_t d) { return placed[d]; });
      if (ready) {
        placed[i] = true;
        order.push_back(&catalog.tables[i]);
        progress = true;
        break;  // restart so declaration order breaks ties
      }
    }
    if (!progress) {
      std::vector<std::string> stuck;
      for (size_t i = 0; i < n; ++i) {
        if (!placed[i]) stuck.push_back(catalog.tables[i].name);
      }
      throw Error(ErrorCategory::kUnorderableSchema,
                  fmt::format("foreign-key cycle among tables: {}", fmt::join(stuck, ", ")));
    }
  }
  return order;
}

std::vector<std::string> DdlStatements(const BenchmarkCatalog& catalog, bool fk_variant) {
  std::vector<const TableDef*> order;
  if (fk_variant) {
    order = TopologicalOrder(catalog);
  } else {
    for (const auto& t : catalog.tables) order.push_back(&t);
  }
  std::vector<std::string> out;
  for (const TableDef* t : order) {
    std::vector<std::string> lines;
    for (const auto& c : t->columns) {
      lines.push_back(
          fmt::format("  {} {}{}", c.name, c.type.ToSql(), c.nullable ? "" : " NOT NULL"));
    }
    if (!t->primary_key.empty()) {
      lines.push_back(fmt::format("  PRIMARY KEY ({})", JoinColumns(t->primary_key)));
    }
    if (fk_variant) {
      for (const auto& fk : t->foreign_keys) {
        lines.push_back(fmt::format("  FOREIGN KEY ({}) REFERENCES {} ({})",
                                    JoinColumns(fk.columns), fk.table,
                                    JoinColumns(fk.foreign_columns)));
      }
    }
    out.push_back(fmt::format("CREATE TABLE {} (\n{}\n)", t->name, fmt::join(lines, ",\n")));
  }
  for (const TableDef* t : order) {
    for (const auto& idx : t->indexes) {
      out.push_back(fmt::format("CREATE {}INDEX {} ON {} ({})", idx.unique ? "UNIQUE " : "",
                                idx.name, t->name, JoinColumns(idx.columns)));
    }
  }
  return out;
}

std::string EmitDdl(const BenchmarkCatalog& catalog, bool fk_variant) {
  std::string script = fmt::format("-- {} schema, {} variant\n\n", catalog.name,
                                   fk_variant ? "foreign-key" : "no-foreign-key");
  for (const auto& stmt : DdlStatements(catalog, fk_variant)) {
    script += stmt;
    script += ";\n\n";
  }
  return script;
}

// ---------------------------------------------------------------------------
// Semantic consistency

ConsistencyReport CheckSemanticConsistency(const BenchmarkCatalog& catalog) {
  std::set<std::string> written;
  for (const auto& t : catalog.online) {
    for (const auto& s : t.statements) written.insert(s.tables_written.begin(), s.tables_written.end());
  }
  for (const auto& h : catalog.hybrid) {
    for (const auto& s : h.base.statements) {
      written.insert(s.tables_written.begin(), s.tables_written.end());
    }
  }
  ConsistencyReport report;
  auto check = [&](const std::string& name, size_t index, bool realtime,
                   const StatementTemplate& s) {
    ConsistencyViolation v{name, index, realtime, {}};
    for (const auto& table : s.tables_read) {
      if (!written.count(table)) v.unwritten_tables.insert(table);
    }
    if (!v.unwritten_tables.empty()) {
      report.unwritten_tables.insert(v.unwritten_tables.begin(), v.unwritten_tables.end());
      report.violations.push_back(std::move(v));
    }
  };
  for (const auto& t : catalog.analytical) {
    for (size_t i = 0; i < t.statements.size(); ++i) check(t.name, i, false, t.statements[i]);
  }
  for (const auto& h : catalog.hybrid) check(h.name, 0, true, h.realtime_query);
  report.pass = report.violations.empty();
  return report;
}

std::string ConsistencyReport::ToText() const {
  std::string out = pass ? "PASS\n" : "FAIL\n";
  for (const auto& v : violations) {
    out += fmt::format("  {}{} reads never-written tables: {}\n", v.template_name,
                       v.realtime ? " (real-time query)" : fmt::format("[{}]", v.statement_index),
                       fmt::join(v.unwritten_tables, ", "));
  }
  if (!pass) out += fmt::format("  unwritten: {}\n", fmt::join(unwritten_tables, ", "));
  return out;
}

// ---------------------------------------------------------------------------
// Mixes

Rational Rational::Make(int64_t num, int64_t den) {
  if (den == 0) Invalid("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const int64_t g = std::gcd(num < 0 ? -num : num, den);
  return g > 1 ? Rational{num / g, den / g} : Rational{num, den};
}

Mix::Mix(std::vector<MixEntry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.weight < 0) Invalid(fmt::format("negative weight for {}", e.name));
    total_ += e.weight;
    cumulative_.push_back(total_);
  }
}

Rational Mix::Fraction(std::string_view name) const {
  if (total_ == 0) return {0, 1};
  for (const auto& e : entries_) {
    if (e.name == name) return Rational::Make(e.weight, total_);
  }
  return {0, 1};
}

Rational Mix::ReadOnlyMass() const {
  if (total_ == 0) return {0, 1};
  int64_t ro = 0;
  for (const auto& e : entries_) {
    if (e.read_only) ro += e.weight;
  }
  return Rational::Make(ro, total_);
}

size_t Mix::Pick(int64_t draw) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), draw);
  return static_cast<size_t>(it - cumulative_.begin());
}

Mix DefaultMix(const BenchmarkCatalog& catalog, WorkloadClass cls) {
  std::vector<MixEntry> entries;
  switch (cls) {
    case WorkloadClass::kOnline:
      for (const auto& t : catalog.online) entries.push_back({t.name, t.weight, t.read_only});
      break;
    case WorkloadClass::kAnalytical:
      for (const auto& t : catalog.analytical) entries.push_back({t.name, t.weight, t.read_only});
      break;
    case WorkloadClass::kHybrid:
      for (const auto& h : catalog.hybrid) entries.push_back({h.name, h.weight, h.read_only});
      break;
  }
  return Mix(std::move(entries));
}

// ---------------------------------------------------------------------------
// Instantiation

Value Draw(const Generator& generator, Rng& rng, const BenchmarkCatalog& catalog, int64_t scale) {
  return std::visit(
      [&](const auto& g) -> Value {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, UniformIntGen>) {
          return rng.UniformInt(g.lo, g.hi);
        } else if constexpr (std::is_same_v<G, ZipfGen>) {
          const double u = rng.UniformUnit();
          const double uz = u * g.zetan;
          if (uz < 1.0) return int64_t{1};
          if (uz < 1.0 + std::pow(0.5, g.theta)) return int64_t{2};
          const auto v = 1 + static_cast<int64_t>(static_cast<double>(g.n) *
                                                  std::pow(g.eta * u - g.eta + 1.0, g.alpha));
          return std::min(v, g.n);
        } else if constexpr (std::is_same_v<G, ScaledIdGen>) {
          const TableDef* t = catalog.FindTable(g.table);
          if (!t) Invalid(fmt::format("scaled-id over unknown table {}", g.table));
          const int64_t id = rng.UniformInt(1, t->cardinality.Rows(scale));
          if (g.zero_pad > 0) return fmt::format("{:0{}}", id, g.zero_pad);
          return id;
        } else if constexpr (std::is_same_v<G, StringPatternGen>) {
          const auto len = rng.UniformInt(g.min_len, g.max_len);
          std::string s = g.prefix;
          s.reserve(g.prefix.size() + static_cast<size_t>(len) + g.suffix.size());
          const auto last = static_cast<int64_t>(g.alphabet.size()) - 1;
          for (int64_t i = 0; i < len; ++i) s.push_back(g.alphabet[rng.UniformInt(0, last)]);
          s += g.suffix;
          return s;
        } else if constexpr (std::is_same_v<G, ConstantGen>) {
          return g.value;
        } else if constexpr (std::is_same_v<G, UniformDecimalGen>) {
          const double unit = std::pow(10.0, g.digits);
          const auto lo = static_cast<int64_t>(std::llround(g.lo * unit));
          const auto hi = static_cast<int64_t>(std::llround(g.hi * unit));
          return static_cast<double>(rng.UniformInt(lo, hi)) / unit;
        } else {
          static_assert(std::is_same_v<G, TimestampGen>);
          return FormatTimestamp(rng.UniformInt(g.lo, g.hi));
        }
      },
      generator);
}

namespace {

BoundStatement Bind(const StatementTemplate& s, bool realtime, Rng& rng,
                    const BenchmarkCatalog& catalog, int64_t scale,
                    std::map<std::string, Value>& drawn) {
  BoundStatement b;
  b.source = &s;
  b.realtime = realtime;
  b.params.reserve(s.params.size());
  for (const auto& p : s.params) {
    if (!p.name.empty()) {
      auto it = drawn.find(p.name);
      if (it != drawn.end()) {
        b.params.push_back(it->second);
        continue;
      }
    }
    Value v = Draw(p.generator, rng, catalog, scale);
    if (!p.name.empty()) drawn.emplace(p.name, v);
    b.params.push_back(std::move(v));
  }
  return b;
}

void RequireScale(int64_t scale) {
  if (scale < 1) Invalid(fmt::format("scale must be >= 1, got {}", scale));
}

}  // namespace

BoundTransaction Instantiate(const BenchmarkCatalog& catalog, const TransactionTemplate& tmpl,
                             Rng& rng, int64_t scale) {
  RequireScale(scale);
  BoundTransaction out;
  out.name = tmpl.name;
  out.cls = tmpl.cls;
  out.read_only = tmpl.read_only;
  std::map<std::string, Value> drawn;
  for (const auto& s : tmpl.statements) {
    out.statements.push_back(Bind(s, false, rng, catalog, scale, drawn));
  }
  return out;
}

BoundTransaction Instantiate(const BenchmarkCatalog& catalog, const HybridTemplate& tmpl, Rng& rng,
                             int64_t scale) {
  RequireScale(scale);
  BoundTransaction out;
  out.name = tmpl.name;
  out.cls = WorkloadClass::kHybrid;
  out.read_only = tmpl.read_only;
  std::map<std::string, Value> drawn;
  const auto& base = tmpl.base.statements;
  for (size_t i = 0; i <= base.size(); ++i) {
    if (i == tmpl.insertion_index) {
      out.realtime_index = out.statements.size();
      out.statements.push_back(Bind(tmpl.realtime_query, true, rng, catalog, scale, drawn));
    }
    if (i < base.size()) out.statements.push_back(Bind(base[i], false, rng, catalog, scale, drawn));
  }
  return out;
}

bool SameBindings(const BoundTransaction& a, const BoundTransaction& b) {
  if (a.name != b.name || a.cls != b.cls || a.read_only != b.read_only ||
      a.realtime_index != b.realtime_index || a.statements.size() != b.statements.size()) {
    return false;
  }
  for (size_t i = 0; i < a.statements.size(); ++i) {
    const auto& x = a.statements[i];
    const auto& y = b.statements[i];
    if (x.sql() != y.sql() || x.realtime != y.realtime || x.params != y.params) return false;
  }
  return true;
}

}  // namespace olxp
