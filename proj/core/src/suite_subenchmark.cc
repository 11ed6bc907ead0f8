// subenchmark: the general-purpose retail suite (TPC-C online side).

#include <fmt/format.h>

#include "suites.h"

namespace olxp::suites {
namespace {

constexpr int64_t kYear2024 = 1704067200;  // 2024-01-01 00:00:00 UTC
constexpr int64_t kYear2025 = 1735689600;
constexpr int64_t kYear2026 = 1767225600;

std::vector<TableDef> Tables() {
  const auto i = SqlType::Integer();
  const auto ts = SqlType::Timestamp();
  auto vc = [](int n) { return SqlType::Varchar(n); };
  auto dec = [](int p, int s) { return SqlType::Decimal(p, s); };

  std::vector<TableDef> t;
  t.push_back({"WAREHOUSE",
               {Col("w_id", i), Col("w_name", vc(10)), Col("w_street_1", vc(20)),
                Col("w_street_2", vc(20)), Col("w_city", vc(20)), Col("w_state", vc(2)),
                Col("w_zip", vc(9)), Col("w_tax", dec(4, 4)), Col("w_ytd", dec(12, 2))},
               {"w_id"},
               {},
               {},
               {1, true}});
  t.push_back({"DISTRICT",
               {Col("d_id", i), Col("d_w_id", i), Col("d_name", vc(10)), Col("d_street_1", vc(20)),
                Col("d_street_2", vc(20)), Col("d_city", vc(20)), Col("d_state", vc(2)),
                Col("d_zip", vc(9)), Col("d_tax", dec(4, 4)), Col("d_ytd", dec(12, 2)),
                Col("d_next_o_id", i)},
               {"d_w_id", "d_id"},
               {},
               {{{"d_w_id"}, "WAREHOUSE", {"w_id"}}},
               {kDistrictsPerWarehouse, true}});
  t.push_back({"CUSTOMER",
               {Col("c_id", i), Col("c_d_id", i), Col("c_w_id", i), Col("c_first", vc(16)),
                Col("c_middle", vc(2)), Col("c_last", vc(16)), Col("c_street_1", vc(20)),
                Col("c_street_2", vc(20)), Col("c_city", vc(20)), Col("c_state", vc(2)),
                Col("c_zip", vc(9)), Col("c_phone", vc(16)), Col("c_since", ts),
                Col("c_credit", vc(2)), Col("c_credit_lim", dec(12, 2)),
                Col("c_discount", dec(4, 4)), Col("c_balance", dec(12, 2)),
                Col("c_ytd_payment", dec(12, 2)), Col("c_payment_cnt", i),
                Col("c_delivery_cnt", i), Col("c_data", vc(500))},
               {"c_w_id", "c_d_id", "c_id"},
               {{"IDX_CUSTOMER_NAME", {"c_w_id", "c_d_id", "c_last", "c_first"}}},
               {{{"c_w_id", "c_d_id"}, "DISTRICT", {"d_w_id", "d_id"}}},
               {kDistrictsPerWarehouse * kCustomersPerDistrict, true}});
  t.push_back({"HISTORY",
               {Col("h_c_id", i), Col("h_c_d_id", i), Col("h_c_w_id", i), Col("h_d_id", i),
                Col("h_w_id", i), Col("h_date", ts), Col("h_amount", dec(6, 2)),
                Col("h_data", vc(24))},
               {},
               {{"IDX_HISTORY_CUSTOMER", {"h_c_w_id", "h_c_d_id", "h_c_id"}}},
               {{{"h_c_w_id", "h_c_d_id", "h_c_id"}, "CUSTOMER", {"c_w_id", "c_d_id", "c_id"}},
                {{"h_w_id", "h_d_id"}, "DISTRICT", {"d_w_id", "d_id"}}},
               {kDistrictsPerWarehouse * kCustomersPerDistrict, true}});
  t.push_back({"NEW_ORDER",
               {Col("no_o_id", i), Col("no_d_id", i), Col("no_w_id", i)},
               {"no_w_id", "no_d_id", "no_o_id"},
               {},
               {{{"no_w_id", "no_d_id", "no_o_id"}, "ORDERS", {"o_w_id", "o_d_id", "o_id"}}},
               {kDistrictsPerWarehouse * (kOrdersPerDistrict - kFirstUndeliveredOrder + 1), true}});
  t.push_back({"ORDERS",
               {Col("o_id", i), Col("o_d_id", i), Col("o_w_id", i), Col("o_c_id", i),
                Col("o_entry_d", ts), Col("o_carrier_id", i, true), Col("o_ol_cnt", i),
                Col("o_all_local", i)},
               {"o_w_id", "o_d_id", "o_id"},
               {{"IDX_ORDER_CUSTOMER", {"o_w_id", "o_d_id", "o_c_id", "o_id"}}},
               {{{"o_w_id", "o_d_id", "o_c_id"}, "CUSTOMER", {"c_w_id", "c_d_id", "c_id"}}},
               {kDistrictsPerWarehouse * kOrdersPerDistrict, true}});
  t.push_back({"ORDER_LINE",
               {Col("ol_o_id", i), Col("ol_d_id", i), Col("ol_w_id", i), Col("ol_number", i),
                Col("ol_i_id", i), Col("ol_supply_w_id", i), Col("ol_delivery_d", ts, true),
                Col("ol_quantity", i), Col("ol_amount", dec(6, 2)), Col("ol_dist_info", vc(24))},
               {"ol_w_id", "ol_d_id", "ol_o_id", "ol_number"},
               {},
               {{{"ol_w_id", "ol_d_id", "ol_o_id"}, "ORDERS", {"o_w_id", "o_d_id", "o_id"}},
                {{"ol_supply_w_id", "ol_i_id"}, "STOCK", {"s_w_id", "s_i_id"}}},
               {kDistrictsPerWarehouse * kOrdersPerDistrict * kLinesPerOrder, true}});
  t.push_back({"ITEM",
               {Col("i_id", i), Col("i_im_id", i), Col("i_name", vc(24)),
                Col("i_price", dec(5, 2)), Col("i_data", vc(50))},
               {"i_id"},
               {},
               {},
               {kItems, false}});
  std::vector<ColumnDef> stock = {Col("s_i_id", i), Col("s_w_id", i), Col("s_quantity", i)};
  for (int k = 1; k <= 10; ++k) stock.push_back(Col(fmt::format("s_dist_{:02}", k), vc(24)));
  for (const char* c : {"s_ytd", "s_order_cnt", "s_remote_cnt"}) stock.push_back(Col(c, i));
  stock.push_back(Col("s_data", vc(50)));
  t.push_back({"STOCK",
               std::move(stock),
               {"s_w_id", "s_i_id"},
               {},
               {{{"s_w_id"}, "WAREHOUSE", {"w_id"}}, {{"s_i_id"}, "ITEM", {"i_id"}}},
               {kItems, true}});
  return t;
}

TxnBuilder Keys(std::string name, WorkloadClass cls, int64_t weight) {
  TxnBuilder b(std::move(name), cls, weight);
  b.Var("w", ScaledIdGen{"WAREHOUSE"})
      .Var("d", UniformIntGen{1, kDistrictsPerWarehouse})
      .Var("c", UniformIntGen{1, kCustomersPerDistrict})
      .Var("ts", TimestampGen{kYear2025, kYear2026 - 1});
  return b;
}

TxnBuilder NewOrder() {
  TxnBuilder b = Keys("NewOrder", WorkloadClass::kOnline, 45);
  b.Var("adj", UniformDecimalGen{0.98, 1.02, 4});
  for (int k = 1; k <= kLinesPerOrder; ++k) {
    b.Var(fmt::format("i{}", k), ScaledIdGen{"ITEM"});
    b.Var(fmt::format("q{}", k), UniformIntGen{1, 10});
  }
  b.Stmt("SELECT w_tax FROM WAREHOUSE WHERE w_id = ?", {"WAREHOUSE"}, {}, {"w"})
      .Stmt("SELECT c_discount, c_last, c_credit FROM CUSTOMER "
            "WHERE c_w_id = ? AND c_d_id = ? AND c_id = ?",
            {"CUSTOMER"}, {}, {"w", "d", "c"})
      .Stmt("UPDATE DISTRICT SET d_next_o_id = d_next_o_id + 1 WHERE d_w_id = ? AND d_id = ?", {},
            {"DISTRICT"}, {"w", "d"})
      .Stmt("INSERT INTO ORDERS (o_id, o_d_id, o_w_id, o_c_id, o_entry_d, o_carrier_id, o_ol_cnt, "
            "o_all_local) SELECT d_next_o_id - 1, d_id, d_w_id, ?, ?, NULL, 5, 1 FROM DISTRICT "
            "WHERE d_w_id = ? AND d_id = ?",
            {"DISTRICT"}, {"ORDERS"}, {"c", "ts", "w", "d"})
      .Stmt("INSERT INTO NEW_ORDER (no_o_id, no_d_id, no_w_id) SELECT d_next_o_id - 1, d_id, "
            "d_w_id FROM DISTRICT WHERE d_w_id = ? AND d_id = ?",
            {"DISTRICT"}, {"NEW_ORDER"}, {"w", "d"});
  // Dynamic pricing: the first ordered item's price drifts by up to 2%.
  b.Stmt("UPDATE ITEM SET i_price = i_price * ? WHERE i_id = ?", {}, {"ITEM"}, {"adj", "i1"});
  for (int k = 1; k <= kLinesPerOrder; ++k) {
    const std::string item = fmt::format("i{}", k);
    const std::string qty = fmt::format("q{}", k);
    b.Stmt("SELECT i_price, i_name, i_data FROM ITEM WHERE i_id = ?", {"ITEM"}, {},
           {item.c_str()});
    b.Stmt("UPDATE STOCK SET s_quantity = CASE WHEN s_quantity >= ? + 10 THEN s_quantity - ? "
           "ELSE s_quantity - ? + 91 END, s_ytd = s_ytd + ?, s_order_cnt = s_order_cnt + 1 "
           "WHERE s_w_id = ? AND s_i_id = ?",
           {}, {"STOCK"}, {qty.c_str(), qty.c_str(), qty.c_str(), qty.c_str(), "w", item.c_str()});
    b.Stmt(fmt::format("INSERT INTO ORDER_LINE (ol_o_id, ol_d_id, ol_w_id, ol_number, ol_i_id, "
                       "ol_supply_w_id, ol_delivery_d, ol_quantity, ol_amount, ol_dist_info) "
                       "SELECT d_next_o_id - 1, d_id, d_w_id, {}, i_id, s_w_id, NULL, ?, "
                       "? * i_price, s_dist_01 FROM DISTRICT, ITEM, STOCK WHERE d_w_id = ? AND "
                       "d_id = ? AND i_id = ? AND s_w_id = ? AND s_i_id = ?",
                       k),
           {"DISTRICT", "ITEM", "STOCK"}, {"ORDER_LINE"},
           {qty.c_str(), qty.c_str(), "w", "d", item.c_str(), "w", item.c_str()});
  }
  return b;
}

// NewOrder statement index of the price adjustment; the real-time lowest-price
// query runs just before it, ahead of every item lookup.
constexpr size_t kNewOrderPricing = 5;

TxnBuilder Payment() {
  TxnBuilder b = Keys("Payment", WorkloadClass::kOnline, 43);
  b.Var("amount", UniformDecimalGen{1.0, 5000.0, 2})
      .Var("hdata", StringPatternGen{std::string(kAlphaNumeric), 12, 24, "", ""});
  b.Stmt("UPDATE WAREHOUSE SET w_ytd = w_ytd + ? WHERE w_id = ?", {}, {"WAREHOUSE"},
         {"amount", "w"})
      .Stmt("SELECT w_name, w_street_1, w_street_2, w_city, w_state, w_zip FROM WAREHOUSE "
            "WHERE w_id = ?",
            {"WAREHOUSE"}, {}, {"w"})
      .Stmt("UPDATE DISTRICT SET d_ytd = d_ytd + ? WHERE d_w_id = ? AND d_id = ?", {},
            {"DISTRICT"}, {"amount", "w", "d"})
      .Stmt("SELECT d_name, d_street_1, d_street_2, d_city, d_state, d_zip FROM DISTRICT "
            "WHERE d_w_id = ? AND d_id = ?",
            {"DISTRICT"}, {}, {"w", "d"})
      .Stmt("UPDATE CUSTOMER SET c_balance = c_balance - ?, c_ytd_payment = c_ytd_payment + ?, "
            "c_payment_cnt = c_payment_cnt + 1 WHERE c_w_id = ? AND c_d_id = ? AND c_id = ?",
            {}, {"CUSTOMER"}, {"amount", "amount", "w", "d", "c"})
      .Stmt("SELECT c_first, c_middle, c_last, c_balance, c_credit FROM CUSTOMER "
            "WHERE c_w_id = ? AND c_d_id = ? AND c_id = ?",
            {"CUSTOMER"}, {}, {"w", "d", "c"})
      .Stmt("INSERT INTO HISTORY (h_c_id, h_c_d_id, h_c_w_id, h_d_id, h_w_id, h_date, h_amount, "
            "h_data) VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
            {}, {"HISTORY"}, {"c", "d", "w", "d", "w", "ts", "amount", "hdata"});
  return b;
}

TxnBuilder OrderStatus() {
  TxnBuilder b = Keys("OrderStatus", WorkloadClass::kOnline, 4);
  b.Stmt("SELECT c_first, c_middle, c_last, c_balance FROM CUSTOMER "
         "WHERE c_w_id = ? AND c_d_id = ? AND c_id = ?",
         {"CUSTOMER"}, {}, {"w", "d", "c"})
      .Stmt("SELECT o_id, o_carrier_id, o_entry_d FROM ORDERS WHERE o_w_id = ? AND o_d_id = ? "
            "AND o_c_id = ? ORDER BY o_id DESC LIMIT 1",
            {"ORDERS"}, {}, {"w", "d", "c"})
      .Stmt("SELECT ol_i_id, ol_supply_w_id, ol_quantity, ol_amount, ol_delivery_d FROM "
            "ORDER_LINE WHERE ol_w_id = ? AND ol_d_id = ? AND ol_o_id = (SELECT MAX(o_id) FROM "
            "ORDERS WHERE o_w_id = ? AND o_d_id = ? AND o_c_id = ?)",
            {"ORDER_LINE", "ORDERS"}, {}, {"w", "d", "w", "d", "c"});
  return b;
}

TxnBuilder Delivery() {
  TxnBuilder b = Keys("Delivery", WorkloadClass::kOnline, 4);
  b.Var("carrier", UniformIntGen{1, 10});
  for (int d = 1; d <= kDistrictsPerWarehouse; ++d) {
    const std::string oldest = fmt::format(
        "(SELECT MIN(no_o_id) FROM NEW_ORDER WHERE no_w_id = ? AND no_d_id = {})", d);
    b.Stmt(fmt::format("UPDATE ORDERS SET o_carrier_id = ? WHERE o_w_id = ? AND o_d_id = {} AND "
                       "o_id = {}",
                       d, oldest),
           {"NEW_ORDER"}, {"ORDERS"}, {"carrier", "w", "w"});
    b.Stmt(fmt::format("UPDATE ORDER_LINE SET ol_delivery_d = ? WHERE ol_w_id = ? AND "
                       "ol_d_id = {} AND ol_o_id = {}",
                       d, oldest),
           {"NEW_ORDER"}, {"ORDER_LINE"}, {"ts", "w", "w"});
    b.Stmt(fmt::format("UPDATE CUSTOMER SET c_balance = c_balance + (SELECT COALESCE(SUM("
                       "ol_amount), 0) FROM ORDER_LINE WHERE ol_w_id = ? AND ol_d_id = {0} AND "
                       "ol_o_id = {1}), c_delivery_cnt = c_delivery_cnt + 1 WHERE c_w_id = ? AND "
                       "c_d_id = {0} AND c_id = (SELECT o_c_id FROM ORDERS WHERE o_w_id = ? AND "
                       "o_d_id = {0} AND o_id = {1})",
                       d, oldest),
           {"ORDER_LINE", "NEW_ORDER", "ORDERS"}, {"CUSTOMER"}, {"w", "w", "w", "w", "w"});
    b.Stmt(fmt::format("DELETE FROM NEW_ORDER WHERE no_w_id = ? AND no_d_id = {} AND no_o_id = {}",
                       d, oldest),
           {"NEW_ORDER"}, {"NEW_ORDER"}, {"w", "w"});
  }
  return b;
}

TxnBuilder StockLevel() {
  TxnBuilder b = Keys("StockLevel", WorkloadClass::kOnline, 4);
  b.Var("threshold", UniformIntGen{10, 20});
  b.Stmt("SELECT d_next_o_id FROM DISTRICT WHERE d_w_id = ? AND d_id = ?", {"DISTRICT"}, {},
         {"w", "d"})
      .Stmt("SELECT COUNT(DISTINCT s_i_id) FROM DISTRICT, ORDER_LINE, STOCK WHERE d_w_id = ? AND "
            "d_id = ? AND ol_w_id = d_w_id AND ol_d_id = d_id AND ol_o_id < d_next_o_id AND "
            "ol_o_id >= d_next_o_id - 20 AND s_w_id = ol_w_id AND s_i_id = ol_i_id AND "
            "s_quantity < ?",
            {"DISTRICT", "ORDER_LINE", "STOCK"}, {}, {"w", "d", "threshold"});
  return b;
}

std::vector<TransactionTemplate> Analytical() {
  auto q = [](const char* name) {
    TxnBuilder b(name, WorkloadClass::kAnalytical, 1);
    b.Var("date", TimestampGen{kYear2024, kYear2025 - 1})
        .Var("price", UniformDecimalGen{1.0, 100.0, 2})
        .Var("qty", UniformIntGen{10, 20});
    return b;
  };
  std::vector<TransactionTemplate> out;
  // Orders analytical report: per line number totals and averages as of a date.
  out.push_back(q("Q1").Stmt("SELECT ol_number, SUM(ol_quantity) AS sum_qty, SUM(ol_amount) AS "
                             "sum_amount, AVG(ol_quantity) AS avg_qty, AVG(ol_amount) AS "
                             "avg_amount, COUNT(*) AS count_order FROM ORDER_LINE WHERE "
                             "ol_delivery_d > ? GROUP BY ol_number ORDER BY ol_number",
                             {"ORDER_LINE"}, {}, {"date"})
                         .Build());
  out.push_back(q("Q2").Stmt("SELECT c_w_id, c_d_id, SUM(c_balance), AVG(c_ytd_payment), "
                             "MAX(c_payment_cnt) FROM CUSTOMER GROUP BY c_w_id, c_d_id ORDER BY "
                             "c_w_id, c_d_id",
                             {"CUSTOMER"}, {})
                         .Build());
  out.push_back(q("Q3").Stmt("SELECT c_id, c_last, SUM(ol_amount) AS revenue FROM CUSTOMER, "
                             "ORDERS, ORDER_LINE WHERE c_w_id = o_w_id AND c_d_id = o_d_id AND "
                             "c_id = o_c_id AND ol_w_id = o_w_id AND ol_d_id = o_d_id AND ol_o_id "
                             "= o_id AND o_entry_d >= ? GROUP BY c_id, c_last ORDER BY revenue "
                             "DESC LIMIT 10",
                             {"CUSTOMER", "ORDERS", "ORDER_LINE"}, {}, {"date"})
                         .Build());
  out.push_back(q("Q4").Stmt("SELECT s_w_id, COUNT(*) AS low_stock, AVG(s_ytd) FROM STOCK WHERE "
                             "s_quantity < ? GROUP BY s_w_id ORDER BY low_stock DESC",
                             {"STOCK"}, {}, {"qty"})
                         .Build());
  out.push_back(q("Q5").Stmt("SELECT h_w_id, h_d_id, COUNT(*), SUM(h_amount) AS paid FROM HISTORY "
                             "WHERE h_date >= ? GROUP BY h_w_id, h_d_id ORDER BY paid DESC",
                             {"HISTORY"}, {}, {"date"})
                         .Build());
  out.push_back(q("Q6").Stmt("SELECT no_w_id, no_d_id, COUNT(*), MIN(no_o_id), MAX(no_o_id) FROM "
                             "NEW_ORDER GROUP BY no_w_id, no_d_id ORDER BY no_w_id, no_d_id",
                             {"NEW_ORDER"}, {})
                         .Build());
  out.push_back(q("Q7").Stmt("SELECT i_id, i_name, SUM(ol_quantity) AS qty FROM ITEM, ORDER_LINE "
                             "WHERE i_id = ol_i_id AND i_price > ? GROUP BY i_id, i_name ORDER "
                             "BY qty DESC LIMIT 20",
                             {"ITEM", "ORDER_LINE"}, {}, {"price"})
                         .Build());
  out.push_back(q("Q8").Stmt("SELECT w_id, w_name, w_ytd, (SELECT SUM(d_ytd) FROM DISTRICT WHERE "
                             "d_w_id = w_id) AS district_ytd FROM WAREHOUSE ORDER BY w_id",
                             {"WAREHOUSE", "DISTRICT"}, {})
                         .Build());
  out.push_back(q("Q9").Stmt("SELECT c_w_id, c_d_id, COUNT(*) FROM CUSTOMER WHERE c_balance > "
                             "(SELECT AVG(c_balance) FROM CUSTOMER) GROUP BY c_w_id, c_d_id "
                             "ORDER BY c_w_id, c_d_id",
                             {"CUSTOMER"}, {})
                         .Build());
  return out;
}

}  // namespace

BenchmarkCatalog Subenchmark() {
  BenchmarkCatalog c;
  c.name = "subenchmark";
  c.tables = Tables();

  TxnBuilder new_order = NewOrder();
  TxnBuilder payment = Payment();
  TxnBuilder order_status = OrderStatus();
  TxnBuilder delivery = Delivery();
  TxnBuilder stock_level = StockLevel();
  for (auto* b : {&new_order, &payment, &order_status, &delivery, &stock_level}) {
    c.online.push_back(b->Build());
  }
  c.analytical = Analytical();

  new_order.Var("im", UniformIntGen{1, 10000});
  c.hybrid.push_back(MakeHybrid(
      "X1", c.online[0], kNewOrderPricing, 20,
      new_order.MakeStatement("SELECT MIN(i_price) FROM ITEM WHERE i_im_id = ?", {"ITEM"}, {},
                              {"im"})));
  c.hybrid.push_back(MakeHybrid(
      "X2", c.online[1], 4, 15,
      payment.MakeStatement("SELECT COUNT(*), SUM(h_amount), AVG(h_amount) FROM HISTORY WHERE "
                            "h_c_w_id = ? AND h_c_d_id = ? AND h_c_id = ?",
                            {"HISTORY"}, {}, {"w", "d", "c"})));
  c.hybrid.push_back(MakeHybrid(
      "X3", c.online[2], 1, 30,
      order_status.MakeStatement(
          "SELECT AVG(ol_amount), MAX(ol_amount) FROM ORDER_LINE WHERE ol_w_id = ? AND ol_d_id = ?",
          {"ORDER_LINE"}, {}, {"w", "d"})));
  c.hybrid.push_back(MakeHybrid(
      "X4", c.online[3], 0, 5,
      delivery.MakeStatement("SELECT COUNT(*), MIN(no_o_id) FROM NEW_ORDER WHERE no_w_id = ?",
                             {"NEW_ORDER"}, {}, {"w"})));
  c.hybrid.push_back(MakeHybrid(
      "X5", c.online[4], 1, 30,
      stock_level.MakeStatement(
          "SELECT MIN(s_quantity), AVG(s_quantity), SUM(s_order_cnt) FROM STOCK WHERE s_w_id = ?",
          {"STOCK"}, {}, {"w"})));
  return c;
}

}  // namespace olxp::suites
