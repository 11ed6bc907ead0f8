#include <nlohmann/json.hpp>

#include "olxp/benchspec.h"

namespace olxp {
namespace {

using nlohmann::json;

json StatementJson(const StatementTemplate& s) {
  json params = json::array();
  for (const auto& p : s.params) params.push_back(p.name);
  return {{"sql", s.sql},
          {"reads", s.tables_read},
          {"writes", s.tables_written},
          {"params", std::move(params)}};
}

json TemplateJson(const TransactionTemplate& t) {
  json statements = json::array();
  for (const auto& s : t.statements) statements.push_back(StatementJson(s));
  return {{"name", t.name},
          {"class", std::string(ClassName(t.cls))},
          {"read_only", t.read_only},
          {"weight", t.weight},
          {"statements", std::move(statements)}};
}

}  // namespace

std::string InventoryJson(const BenchmarkCatalog& catalog) {
  json tables = json::array();
  for (const auto& t : catalog.tables) {
    json columns = json::array();
    for (const auto& c : t.columns) {
      columns.push_back({{"name", c.name}, {"type", c.type.ToSql()}, {"nullable", c.nullable}});
    }
    json indexes = json::array();
    for (const auto& ix : t.indexes) {
      indexes.push_back({{"name", ix.name}, {"columns", ix.columns}, {"unique", ix.unique}});
    }
    json fks = json::array();
    for (const auto& fk : t.foreign_keys) {
      fks.push_back({{"columns", fk.columns},
                     {"table", fk.table},
                     {"foreign_columns", fk.foreign_columns}});
    }
    tables.push_back({{"name", t.name},
                      {"columns", std::move(columns)},
                      {"primary_key", t.primary_key},
                      {"indexes", std::move(indexes)},
                      {"foreign_keys", std::move(fks)}});
  }

  json online = json::array();
  for (const auto& t : catalog.online) online.push_back(TemplateJson(t));
  json analytical = json::array();
  for (const auto& t : catalog.analytical) analytical.push_back(TemplateJson(t));
  json hybrid = json::array();
  for (const auto& h : catalog.hybrid) {
    hybrid.push_back({{"name", h.name},
                      {"base", h.base.name},
                      {"insertion_index", h.insertion_index},
                      {"read_only", h.read_only},
                      {"weight", h.weight},
                      {"realtime_query", StatementJson(h.realtime_query)}});
  }

  json doc = {{"benchmark", catalog.name},
              {"counts",
               {{"tables", catalog.tables.size()},
                {"columns", catalog.ColumnCount()},
                {"indexes", catalog.IndexCount()},
                {"online", catalog.online.size()},
                {"analytical", catalog.analytical.size()},
                {"hybrid", catalog.hybrid.size()}}},
              {"tables", std::move(tables)},
              {"online", std::move(online)},
              {"analytical", std::move(analytical)},
              {"hybrid", std::move(hybrid)}};
  return doc.dump(2) + "\n";
}

}  // namespace olxp
