#include "olxp/datagen.h"

#include <chrono>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "olxp/error.h"
#include "suites.h"

namespace olxp {
namespace {

using suites::kCustomersPerDistrict;
using suites::kDistrictsPerWarehouse;
using suites::kFirstUndeliveredOrder;
using suites::kItems;
using suites::kLinesPerOrder;
using suites::kOrdersPerDistrict;

constexpr int64_t kYear2024 = 1704067200;
constexpr int64_t kYear2025 = 1735689600;

uint64_t NameTag(std::string_view name) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string AString(Rng& rng, int lo, int hi) {
  const int n = static_cast<int>(rng.UniformInt(lo, hi));
  std::string s(n, ' ');
  for (char& c : s) c = kAlphaNumeric[rng.UniformInt(0, kAlphaNumeric.size() - 1)];
  return s;
}

std::string NString(Rng& rng, int n) {
  std::string s(n, ' ');
  for (char& c : s) c = static_cast<char>('0' + rng.UniformInt(0, 9));
  return s;
}

double Dec(Rng& rng, double lo, double hi, int digits) {
  const double scale = std::pow(10.0, digits);
  const auto a = static_cast<int64_t>(std::llround(lo * scale));
  const auto b = static_cast<int64_t>(std::llround(hi * scale));
  return static_cast<double>(rng.UniformInt(a, b)) / scale;
}

Value Ts(Rng& rng, int64_t lo, int64_t hi) { return FormatTimestamp(rng.UniformInt(lo, hi)); }

using Maker = std::function<Row(int64_t, Rng&)>;

// ---------------------------------------------------------------------------
// subenchmark
// ---------------------------------------------------------------------------

// TPC-C last names from a number in [0, 999].
std::string LastName(int64_t n) {
  static const char* kSyllables[] = {"BAR", "OUGHT", "ABLE", "PRI",   "PRES",
                                     "ESE", "ANTI",  "CALLY", "ATION", "EING"};
  return std::string(kSyllables[n / 100]) + kSyllables[(n / 10) % 10] + kSyllables[n % 10];
}

Row Address(Rng& rng) {
  return {AString(rng, 10, 20), AString(rng, 10, 20), AString(rng, 10, 20), AString(rng, 2, 2),
          NString(rng, 4) + "11111"};
}

Maker SubenchmarkMaker(const std::string& table) {
  const int64_t per_w_cust = kDistrictsPerWarehouse * kCustomersPerDistrict;
  const int64_t per_w_orders = kDistrictsPerWarehouse * kOrdersPerDistrict;
  const int64_t undelivered = kOrdersPerDistrict - kFirstUndeliveredOrder + 1;

  if (table == "WAREHOUSE") {
    return [](int64_t i, Rng& rng) {
      Row r = {i + 1, AString(rng, 6, 10)};
      for (auto& v : Address(rng)) r.push_back(std::move(v));
      r.push_back(Dec(rng, 0.0, 0.2, 4));
      r.push_back(300000.0);
      return r;
    };
  }
  if (table == "DISTRICT") {
    return [](int64_t i, Rng& rng) {
      Row r = {i % kDistrictsPerWarehouse + 1, i / kDistrictsPerWarehouse + 1, AString(rng, 6, 10)};
      for (auto& v : Address(rng)) r.push_back(std::move(v));
      r.push_back(Dec(rng, 0.0, 0.2, 4));
      r.push_back(30000.0);
      r.push_back(kOrdersPerDistrict + 1);
      return r;
    };
  }
  if (table == "CUSTOMER") {
    return [per_w_cust](int64_t i, Rng& rng) {
      const int64_t c = i % kCustomersPerDistrict + 1;
      const int64_t d = (i / kCustomersPerDistrict) % kDistrictsPerWarehouse + 1;
      const int64_t w = i / per_w_cust + 1;
      const int64_t last = c <= 1000 ? c - 1 : rng.UniformInt(0, 999);
      Row r = {c, d, w, AString(rng, 8, 16), std::string("OE"), LastName(last)};
      Row addr = Address(rng);
      for (auto& v : addr) r.push_back(std::move(v));
      r.push_back(NString(rng, 16));
      r.push_back(Ts(rng, kYear2024, kYear2025 - 1));
      r.push_back(std::string(rng.UniformInt(1, 10) == 1 ? "BC" : "GC"));
      r.push_back(50000.0);
      r.push_back(Dec(rng, 0.0, 0.5, 4));
      r.push_back(-10.0);
      r.push_back(10.0);
      r.push_back(int64_t{1});
      r.push_back(int64_t{0});
      r.push_back(AString(rng, 300, 500));
      return r;
    };
  }
  if (table == "HISTORY") {
    return [per_w_cust](int64_t i, Rng& rng) {
      const int64_t c = i % kCustomersPerDistrict + 1;
      const int64_t d = (i / kCustomersPerDistrict) % kDistrictsPerWarehouse + 1;
      const int64_t w = i / per_w_cust + 1;
      return Row{c, d, w, d, w, Ts(rng, kYear2024, kYear2025 - 1), 10.0, AString(rng, 12, 24)};
    };
  }
  if (table == "NEW_ORDER") {
    return [undelivered](int64_t i, Rng&) {
      const int64_t o = kFirstUndeliveredOrder + i % undelivered;
      const int64_t d = (i / undelivered) % kDistrictsPerWarehouse + 1;
      const int64_t w = i / (undelivered * kDistrictsPerWarehouse) + 1;
      return Row{o, d, w};
    };
  }
  if (table == "ORDERS") {
    return [per_w_orders](int64_t i, Rng& rng) {
      const int64_t o = i % kOrdersPerDistrict + 1;
      const int64_t d = (i / kOrdersPerDistrict) % kDistrictsPerWarehouse + 1;
      const int64_t w = i / per_w_orders + 1;
      // Customer ids form a permutation of the district's customers.
      const int64_t c = ((o - 1) * 7) % kCustomersPerDistrict + 1;
      Value carrier = std::monostate{};
      if (o < kFirstUndeliveredOrder) carrier = rng.UniformInt(1, 10);
      return Row{o, d, w, c, Ts(rng, kYear2024, kYear2025 - 1), carrier, kLinesPerOrder,
                 int64_t{1}};
    };
  }
  if (table == "ORDER_LINE") {
    return [per_w_orders](int64_t i, Rng& rng) {
      const int64_t number = i % kLinesPerOrder + 1;
      const int64_t order = i / kLinesPerOrder;
      const int64_t o = order % kOrdersPerDistrict + 1;
      const int64_t d = (order / kOrdersPerDistrict) % kDistrictsPerWarehouse + 1;
      const int64_t w = order / per_w_orders + 1;
      const bool delivered = o < kFirstUndeliveredOrder;
      const int64_t item = rng.UniformInt(1, kItems);
      Value delivery = std::monostate{};
      if (delivered) delivery = Ts(rng, kYear2024, kYear2025 - 1);
      const double amount = delivered ? 0.0 : Dec(rng, 0.01, 9999.99, 2);
      return Row{o, d, w, number, item, w, delivery, int64_t{5}, amount, AString(rng, 24, 24)};
    };
  }
  if (table == "ITEM") {
    return [](int64_t i, Rng& rng) {
      return Row{i + 1, rng.UniformInt(1, 10000), AString(rng, 14, 24), Dec(rng, 1.0, 100.0, 2),
                 AString(rng, 26, 50)};
    };
  }
  if (table == "STOCK") {
    return [](int64_t i, Rng& rng) {
      Row r = {i % kItems + 1, i / kItems + 1, rng.UniformInt(10, 100)};
      for (int k = 0; k < 10; ++k) r.push_back(AString(rng, 24, 24));
      r.push_back(int64_t{0});
      r.push_back(int64_t{0});
      r.push_back(int64_t{0});
      r.push_back(AString(rng, 26, 50));
      return r;
    };
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// fibenchmark
// ---------------------------------------------------------------------------

Maker FibenchmarkMaker(const std::string& table) {
  if (table == "ACCOUNT") {
    return [](int64_t i, Rng& rng) { return Row{i + 1, AString(rng, 8, 32)}; };
  }
  if (table == "SAVING" || table == "CHECKING") {
    return [](int64_t i, Rng& rng) { return Row{i + 1, Dec(rng, 10000.0, 50000.0, 2)}; };
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// tabenchmark
// ---------------------------------------------------------------------------

// Two distinct types in [1, 4] for one subscriber.
std::pair<int64_t, int64_t> TypePair(uint64_t seed, uint64_t tag, int64_t s_id) {
  Rng rng(DeriveSeed(seed, tag, static_cast<uint64_t>(s_id)));
  const int64_t a = rng.UniformInt(1, 4);
  int64_t b = rng.UniformInt(1, 3);
  if (b >= a) ++b;
  return {a, b};
}

Maker TabenchmarkMaker(const std::string& table, uint64_t seed) {
  const uint64_t ai_tag = NameTag("ACCESS_INFO/types");
  const uint64_t sf_tag = NameTag("SPECIAL_FACILITY/types");
  if (table == "SUBSCRIBER") {
    return [](int64_t i, Rng& rng) {
      const int64_t s = i + 1;
      Row r = {s, rng.UniformInt(1, 4), fmt::format("{:015}", s)};
      for (int k = 0; k < 10; ++k) r.push_back(rng.UniformInt(0, 1));
      for (int k = 0; k < 10; ++k) r.push_back(rng.UniformInt(0, 15));
      for (int k = 0; k < 10; ++k) r.push_back(rng.UniformInt(0, 255));
      r.push_back(rng.UniformInt(1, (int64_t{1} << 31) - 1));
      r.push_back(rng.UniformInt(1, 1000));
      return r;
    };
  }
  if (table == "ACCESS_INFO") {
    return [seed, ai_tag](int64_t i, Rng& rng) {
      const int64_t s = i / suites::kAccessInfoPerSubscriber + 1;
      const auto [a, b] = TypePair(seed, ai_tag, s);
      return Row{s, i % 2 == 0 ? a : b, rng.UniformInt(0, 255), rng.UniformInt(0, 255),
                 AString(rng, 3, 3), AString(rng, 5, 5)};
    };
  }
  if (table == "SPECIAL_FACILITY") {
    return [seed, sf_tag](int64_t i, Rng& rng) {
      const int64_t s = i / suites::kFacilitiesPerSubscriber + 1;
      const auto [a, b] = TypePair(seed, sf_tag, s);
      return Row{s, i % 2 == 0 ? a : b, int64_t{rng.UniformInt(1, 100) <= 85 ? 1 : 0},
                 rng.UniformInt(0, 255), rng.UniformInt(0, 255)};
    };
  }
  if (table == "CALL_FORWARDING") {
    // One forwarding row per special facility.
    return [seed, sf_tag](int64_t i, Rng& rng) {
      const int64_t s = i / suites::kFacilitiesPerSubscriber + 1;
      const auto [a, b] = TypePair(seed, sf_tag, s);
      const int64_t start = 8 * rng.UniformInt(0, 2);
      return Row{s, i % 2 == 0 ? a : b, start, start + rng.UniformInt(1, 8), NString(rng, 15)};
    };
  }
  return nullptr;
}

// Fallback for tables without suite rules: sequential single-column keys,
// type-driven values elsewhere. Foreign keys are not honored.
Maker GenericMaker(const TableDef& table) {
  return [&table](int64_t i, Rng& rng) {
    Row r;
    for (const auto& col : table.columns) {
      const bool key = table.primary_key.size() == 1 && table.primary_key[0] == col.name;
      switch (col.type.kind) {
        case SqlTypeKind::kInteger: r.push_back(key ? i + 1 : rng.UniformInt(1, 100)); break;
        case SqlTypeKind::kDecimal: r.push_back(Dec(rng, 0.0, 1000.0, col.type.scale)); break;
        case SqlTypeKind::kFloat: r.push_back(rng.UniformUnit()); break;
        case SqlTypeKind::kTimestamp: r.push_back(Ts(rng, kYear2024, kYear2025 - 1)); break;
        case SqlTypeKind::kVarchar:
          r.push_back(AString(rng, 1, std::min(col.type.length, 24)));
          break;
      }
    }
    return r;
  };
}

std::string InsertSql(const TableDef& t) {
  std::vector<std::string> names;
  std::vector<std::string> slots;
  for (const auto& c : t.columns) {
    names.push_back(c.name);
    slots.emplace_back("?");
  }
  return fmt::format("INSERT INTO {} ({}) VALUES ({})", t.name, fmt::join(names, ", "),
                     fmt::join(slots, ", "));
}

}  // namespace

std::vector<TableCount> Population(const BenchmarkCatalog& catalog, int64_t scale) {
  if (scale < 1) {
    throw Error(ErrorCategory::kValidation, fmt::format("scale must be >= 1, got {}", scale));
  }
  std::vector<TableCount> out;
  for (const auto& t : catalog.tables) out.push_back({t.name, t.cardinality.Rows(scale)});
  return out;
}

PopulationPlan::PopulationPlan(const BenchmarkCatalog& catalog, int64_t scale, uint64_t seed)
    : seed_(seed), scale_(scale) {
  Population(catalog, scale);  // validates scale
  for (const TableDef* t : TopologicalOrder(catalog)) {
    Maker make;
    if (catalog.name == "subenchmark" || catalog.name == "stitched") {
      make = SubenchmarkMaker(t->name);
    } else if (catalog.name == "fibenchmark") {
      make = FibenchmarkMaker(t->name);
    } else if (catalog.name == "tabenchmark") {
      make = TabenchmarkMaker(t->name, seed);
    }
    if (!make) make = GenericMaker(*t);
    tables_.push_back({t, t->cardinality.Rows(scale), std::move(make)});
  }
}

Row PopulationPlan::Generate(const TablePlan& table, int64_t index) const {
  Rng rng(DeriveSeed(seed_, NameTag(table.table->name), static_cast<uint64_t>(index)));
  Row row = table.make(index, rng);
  if (row.size() != table.table->columns.size()) {
    throw Error(ErrorCategory::kLoad, fmt::format("{} row generator produced {} values for {} columns",
                                                  table.table->name, row.size(),
                                                  table.table->columns.size()));
  }
  return row;
}

LoadSummary Populate(const BenchmarkCatalog& catalog, int64_t scale, uint64_t seed, Pool& pool,
                     const PopulateOptions& options) {
  if (options.batch_size < 1) {
    throw Error(ErrorCategory::kValidation, "batch_size must be >= 1");
  }
  PopulationPlan plan(catalog, scale, seed);
  Lease lease = pool.Acquire();
  Session& session = *lease;

  for (const auto& t : catalog.tables) {
    QueryResult r;
    try {
      r = session.Execute(fmt::format("SELECT 1 FROM {} LIMIT 1", t.name), {});
    } catch (const StatementError& e) {
      throw Error(ErrorCategory::kPrecondition,
                  fmt::format("table {} is not available: {}", t.name, e.what()));
    }
    if (!r.rows.empty()) {
      throw Error(ErrorCategory::kPrecondition,
                  fmt::format("table {} is not empty; populate needs a fresh schema", t.name));
    }
  }

  using Clock = std::chrono::steady_clock;
  LoadSummary summary;
  const auto start = Clock::now();
  for (const auto& tp : plan.tables()) {
    const auto table_start = Clock::now();
    const std::string sql = InsertSql(*tp.table);
    for (int64_t offset = 0; offset < tp.rows; offset += options.batch_size) {
      const int64_t end = std::min(tp.rows, offset + options.batch_size);
      try {
        session.Begin(false);
        for (int64_t i = offset; i < end; ++i) session.Execute(sql, plan.Generate(tp, i));
        session.Commit();
      } catch (const Error& e) {
        try {
          session.Rollback();
        } catch (const Error&) {
        }
        throw Error(ErrorCategory::kLoad, fmt::format("loading {} failed in the batch at row offset "
                                                      "{}: {}",
                                                      tp.table->name, offset, e.what()));
      }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - table_start).count();
    summary.tables.push_back({tp.table->name, tp.rows, secs});
    summary.total_rows += tp.rows;
  }
  summary.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return summary;
}

std::string LoadSummary::ToText() const {
  std::string out = fmt::format("{:<20} {:>10} {:>10}\n", "table", "rows", "seconds");
  for (const auto& t : tables) out += fmt::format("{:<20} {:>10} {:>10.3f}\n", t.table, t.rows, t.seconds);
  out += fmt::format("{:<20} {:>10} {:>10.3f}  ({:.0f} rows/s)\n", "total", total_rows, seconds,
                     RowsPerSecond());
  return out;
}

std::string LoadSummary::ToJson() const {
  nlohmann::json tables_json = nlohmann::json::array();
  for (const auto& t : tables) {
    tables_json.push_back({{"table", t.table}, {"rows", t.rows}, {"seconds", t.seconds}});
  }
  nlohmann::json doc = {{"tables", std::move(tables_json)},
                        {"total_rows", total_rows},
                        {"seconds", seconds},
                        {"rows_per_second", RowsPerSecond()}};
  return doc.dump(2);
}

}  // namespace olxp
