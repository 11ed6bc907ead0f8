// Negative fixture for the consistency checker: TPC-C tables and transactions
// glued to TPC-H style dimension tables that no online statement writes.

#include "suites.h"

namespace olxp::suites {

BenchmarkCatalog Stitched() {
  BenchmarkCatalog c = Subenchmark();
  c.name = "stitched";
  const auto i = SqlType::Integer();
  c.tables.push_back({"REGION",
                      {Col("r_regionkey", i), Col("r_name", SqlType::Varchar(55)),
                       Col("r_comment", SqlType::Varchar(152))},
                      {"r_regionkey"},
                      {},
                      {},
                      {5, false}});
  c.tables.push_back({"NATION",
                      {Col("n_nationkey", i), Col("n_name", SqlType::Varchar(25)),
                       Col("n_regionkey", i), Col("n_comment", SqlType::Varchar(152))},
                      {"n_nationkey"},
                      {},
                      {{{"n_regionkey"}, "REGION", {"r_regionkey"}}},
                      {62, false}});
  c.tables.push_back({"SUPPLIER",
                      {Col("su_suppkey", i), Col("su_name", SqlType::Varchar(25)),
                       Col("su_nationkey", i), Col("su_acctbal", SqlType::Decimal(12, 2))},
                      {"su_suppkey"},
                      {},
                      {{{"su_nationkey"}, "NATION", {"n_nationkey"}}},
                      {10000, false}});

  c.analytical.clear();
  auto q = [](const char* name) { return TxnBuilder(name, WorkloadClass::kAnalytical, 1); };
  // CH-benCHmark Q5 shape: revenue per nation inside one region.
  c.analytical.push_back(
      q("Q5").Stmt("SELECT n.n_name, SUM(ol.ol_amount) AS revenue FROM CUSTOMER c, ORDERS o, "
                   "ORDER_LINE ol, STOCK s, SUPPLIER su, NATION n, REGION r WHERE c.c_id = o.o_c_id "
                   "AND c.c_w_id = o.o_w_id AND c.c_d_id = o.o_d_id AND ol.ol_o_id = o.o_id AND "
                   "ol.ol_w_id = o.o_w_id AND ol.ol_d_id = o.o_d_id AND ol.ol_supply_w_id = "
                   "s.s_w_id AND ol.ol_i_id = s.s_i_id AND (s.s_w_id * s.s_i_id) % 10000 = "
                   "su.su_suppkey AND su.su_nationkey = n.n_nationkey AND n.n_regionkey = "
                   "r.r_regionkey AND r.r_name = 'EUROPE' GROUP BY n.n_name ORDER BY revenue DESC",
                   {"CUSTOMER", "ORDERS", "ORDER_LINE", "STOCK", "SUPPLIER", "NATION", "REGION"},
                   {})
          .Build());
  // Q11 shape: stock held by suppliers of one nation.
  c.analytical.push_back(
      q("Q11").Stmt("SELECT s.s_i_id, SUM(s.s_order_cnt) AS ordercount FROM STOCK s, SUPPLIER su, "
                    "NATION n WHERE (s.s_w_id * s.s_i_id) % 10000 = su.su_suppkey AND "
                    "su.su_nationkey = n.n_nationkey AND n.n_name = 'GERMANY' GROUP BY s.s_i_id "
                    "ORDER BY ordercount DESC",
                    {"STOCK", "SUPPLIER", "NATION"}, {})
          .Build());
  // One consistent query so the report also shows a passing statement.
  c.analytical.push_back(q("Q1").Stmt("SELECT ol_number, SUM(ol_quantity), SUM(ol_amount) FROM "
                                      "ORDER_LINE GROUP BY ol_number ORDER BY ol_number",
                                      {"ORDER_LINE"}, {})
                             .Build());
  return c;
}

}  // namespace olxp::suites
