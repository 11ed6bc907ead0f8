// tabenchmark: telecom home-location-register (TATP online side) with the
// SUBSCRIBER key widened to (s_id, sf_type).

#include <fmt/format.h>

#include "suites.h"

namespace olxp::suites {
namespace {

std::vector<TableDef> Tables() {
  const auto i = SqlType::Integer();
  std::vector<ColumnDef> subscriber = {Col("s_id", i), Col("sf_type", i),
                                       Col("sub_nbr", SqlType::Varchar(15))};
  for (const char* group : {"bit", "hex", "byte2"}) {
    for (int k = 1; k <= 10; ++k) subscriber.push_back(Col(fmt::format("{}_{}", group, k), i));
  }
  subscriber.push_back(Col("msc_location", i));
  subscriber.push_back(Col("vlr_location", i));

  return {
      {"SUBSCRIBER",
       std::move(subscriber),
       {"s_id", "sf_type"},
       {{"IDX_SUBSCRIBER_SID", {"s_id"}, true},
        {"IDX_SUBSCRIBER_NBR", {"sub_nbr"}, true},
        {"IDX_SUBSCRIBER_VLR", {"vlr_location"}}},
       {},
       {kSubscribersPerScale, true}},
      {"ACCESS_INFO",
       {Col("s_id", i), Col("ai_type", i), Col("data1", i), Col("data2", i),
        Col("data3", SqlType::Varchar(3)), Col("data4", SqlType::Varchar(5))},
       {"s_id", "ai_type"},
       {},
       {{{"s_id"}, "SUBSCRIBER", {"s_id"}}},
       {kSubscribersPerScale * kAccessInfoPerSubscriber, true}},
      {"SPECIAL_FACILITY",
       {Col("s_id", i), Col("sf_type", i), Col("is_active", i), Col("error_cntrl", i),
        Col("data_a", i)},
       {"s_id", "sf_type"},
       {{"IDX_SPECIAL_FACILITY_ACTIVE", {"sf_type", "is_active"}}},
       {{{"s_id"}, "SUBSCRIBER", {"s_id"}}},
       {kSubscribersPerScale * kFacilitiesPerSubscriber, true}},
      {"CALL_FORWARDING",
       {Col("s_id", i), Col("sf_type", i), Col("start_time", i), Col("end_time", i),
        Col("numberx", SqlType::Varchar(15))},
       {"s_id", "sf_type", "start_time"},
       {{"IDX_CALL_FORWARDING_START", {"start_time"}}},
       {{{"s_id", "sf_type"}, "SPECIAL_FACILITY", {"s_id", "sf_type"}}},
       {kSubscribersPerScale * kFacilitiesPerSubscriber, true}},
  };
}

TxnBuilder Online(const char* name, int64_t weight) {
  TxnBuilder b(name, WorkloadClass::kOnline, weight);
  b.Var("s", ScaledIdGen{"SUBSCRIBER"})
      .Var("nbr", ScaledIdGen{"SUBSCRIBER", 15})
      .Var("sf", UniformIntGen{1, 4})
      .Var("ai", UniformIntGen{1, 4})
      .Var("slot", UniformIntGen{0, 2})  // start_time = 8 * slot
      .Var("hour", UniformIntGen{1, 24})
      .Var("dur", UniformIntGen{1, 8})
      .Var("bit", UniformIntGen{0, 1})
      .Var("data_a", UniformIntGen{0, 255})
      .Var("vlr", UniformIntGen{1, 1000})
      .Var("numberx", StringPatternGen{std::string(kDigits), 15, 15, "", ""});
  return b;
}

}  // namespace

BenchmarkCatalog Tabenchmark() {
  BenchmarkCatalog c;
  c.name = "tabenchmark";
  c.tables = Tables();

  TxnBuilder get_subscriber = Online("GetSubscriberData", 35);
  get_subscriber.Stmt("SELECT * FROM SUBSCRIBER WHERE s_id = ?", {"SUBSCRIBER"}, {}, {"s"});

  TxnBuilder get_destination = Online("GetNewDestination", 10);
  get_destination.Stmt(
      "SELECT cf.numberx FROM SPECIAL_FACILITY sf, CALL_FORWARDING cf WHERE sf.s_id = ? AND "
      "sf.sf_type = ? AND sf.is_active = 1 AND cf.s_id = sf.s_id AND cf.sf_type = sf.sf_type AND "
      "cf.start_time <= ? * 8 AND cf.end_time > ?",
      {"SPECIAL_FACILITY", "CALL_FORWARDING"}, {}, {"s", "sf", "slot", "hour"});

  TxnBuilder get_access = Online("GetAccessData", 35);
  get_access.Stmt("SELECT data1, data2, data3, data4 FROM ACCESS_INFO WHERE s_id = ? AND "
                  "ai_type = ?",
                  {"ACCESS_INFO"}, {}, {"s", "ai"});

  TxnBuilder update_subscriber = Online("UpdateSubscriberData", 2);
  update_subscriber
      .Stmt("UPDATE SUBSCRIBER SET bit_1 = ? WHERE s_id = ?", {}, {"SUBSCRIBER"}, {"bit", "s"})
      .Stmt("UPDATE SPECIAL_FACILITY SET data_a = ? WHERE s_id = ? AND sf_type = ?", {},
            {"SPECIAL_FACILITY"}, {"data_a", "s", "sf"});

  TxnBuilder update_location = Online("UpdateLocation", 14);
  update_location.Stmt("UPDATE SUBSCRIBER SET vlr_location = ? WHERE sub_nbr = ?", {},
                       {"SUBSCRIBER"}, {"vlr", "nbr"});

  TxnBuilder insert_forwarding = Online("InsertCallForwarding", 2);
  insert_forwarding
      .Stmt("SELECT s_id FROM SUBSCRIBER WHERE sub_nbr = ?", {"SUBSCRIBER"}, {}, {"nbr"})
      .Stmt("SELECT sf_type FROM SPECIAL_FACILITY WHERE s_id = (SELECT s_id FROM SUBSCRIBER "
            "WHERE sub_nbr = ?)",
            {"SPECIAL_FACILITY", "SUBSCRIBER"}, {}, {"nbr"})
      // Guarded insert: no row when the facility is missing or the slot is taken.
      .Stmt("INSERT INTO CALL_FORWARDING (s_id, sf_type, start_time, end_time, numberx) SELECT "
            "sf.s_id, sf.sf_type, ? * 8, ? * 8 + ?, ? FROM SPECIAL_FACILITY sf, SUBSCRIBER sb "
            "WHERE sb.sub_nbr = ? AND sf.s_id = sb.s_id AND sf.sf_type = ? AND NOT EXISTS "
            "(SELECT 1 FROM CALL_FORWARDING cf WHERE cf.s_id = sf.s_id AND cf.sf_type = "
            "sf.sf_type AND cf.start_time = ? * 8)",
            {"SPECIAL_FACILITY", "SUBSCRIBER", "CALL_FORWARDING"}, {"CALL_FORWARDING"},
            {"slot", "slot", "dur", "numberx", "nbr", "sf", "slot"});

  TxnBuilder delete_forwarding = Online("DeleteCallForwarding", 2);
  delete_forwarding
      .Stmt("SELECT s_id FROM SUBSCRIBER WHERE sub_nbr = ?", {"SUBSCRIBER"}, {}, {"nbr"})
      .Stmt("DELETE FROM CALL_FORWARDING WHERE s_id = (SELECT s_id FROM SUBSCRIBER WHERE "
            "sub_nbr = ?) AND sf_type = ? AND start_time = ? * 8",
            {"SUBSCRIBER"}, {"CALL_FORWARDING"}, {"nbr", "sf", "slot"});

  for (auto* b : {&delete_forwarding, &get_access, &get_destination, &get_subscriber,
                  &insert_forwarding, &update_location, &update_subscriber}) {
    c.online.push_back(b->Build());
  }

  auto q = [](const char* name) {
    TxnBuilder b(name, WorkloadClass::kAnalytical, 1);
    b.Var("limit_bit", UniformIntGen{0, 1});
    return b;
  };
  c.analytical.push_back(q("Q1").Stmt("SELECT sf_type, COUNT(*), SUM(is_active), AVG(data_a) "
                                      "FROM SPECIAL_FACILITY GROUP BY sf_type ORDER BY sf_type",
                                      {"SPECIAL_FACILITY"}, {})
                                   .Build());
  c.analytical.push_back(q("Q2").Stmt("SELECT sf.sf_type, COUNT(DISTINCT sb.s_id) FROM SUBSCRIBER "
                                      "sb, SPECIAL_FACILITY sf WHERE sb.s_id = sf.s_id AND "
                                      "sb.bit_1 = ? AND sf.is_active = 1 GROUP BY sf.sf_type "
                                      "ORDER BY sf.sf_type",
                                      {"SUBSCRIBER", "SPECIAL_FACILITY"}, {}, {"limit_bit"})
                                   .Build());
  // Start time query: mean forwarding start time, an input to load forecasting.
  c.analytical.push_back(q("Q3").Stmt("SELECT AVG(start_time), AVG(end_time), COUNT(*) FROM "
                                      "CALL_FORWARDING",
                                      {"CALL_FORWARDING"}, {})
                                   .Build());
  c.analytical.push_back(q("Q4").Stmt("SELECT sf.sf_type, AVG(cf.end_time - cf.start_time) AS "
                                      "span, COUNT(*) FROM SPECIAL_FACILITY sf, CALL_FORWARDING cf "
                                      "WHERE sf.s_id = cf.s_id AND sf.sf_type = cf.sf_type AND "
                                      "sf.is_active = 1 GROUP BY sf.sf_type ORDER BY span DESC",
                                      {"SPECIAL_FACILITY", "CALL_FORWARDING"}, {})
                                   .Build());
  c.analytical.push_back(
      q("Q5").Stmt("SELECT s_id, COUNT(*) AS n FROM CALL_FORWARDING GROUP BY s_id HAVING COUNT(*) "
                   "> (SELECT AVG(cnt) FROM (SELECT COUNT(*) AS cnt FROM CALL_FORWARDING GROUP BY "
                   "s_id) t) ORDER BY n DESC, s_id LIMIT 20",
                   {"CALL_FORWARDING"}, {})
          .Build());

  get_subscriber.Var("fuzzy", StringPatternGen{std::string(kDigits), 3, 3, "%", "%"});
  // online order: Delete, GetAccess, GetNewDestination, GetSubscriber, Insert,
  // UpdateLocation, UpdateSubscriberData
  c.hybrid.push_back(MakeHybrid(
      "X1", c.online[1], 0, 2,
      get_access.MakeStatement(
          "SELECT COUNT(*) FROM SPECIAL_FACILITY WHERE s_id = ? AND is_active = 1",
          {"SPECIAL_FACILITY"}, {}, {"s"})));
  c.hybrid.push_back(MakeHybrid(
      "X2", c.online[2], 0, 2,
      get_destination.MakeStatement(
          "SELECT AVG(end_time - start_time), COUNT(*) FROM CALL_FORWARDING WHERE sf_type = ?",
          {"CALL_FORWARDING"}, {}, {"sf"})));
  c.hybrid.push_back(MakeHybrid(
      "X3", c.online[5], 0, 3,
      update_location.MakeStatement("SELECT COUNT(*) FROM SUBSCRIBER WHERE vlr_location = ?",
                                    {"SUBSCRIBER"}, {}, {"vlr"})));
  c.hybrid.push_back(MakeHybrid(
      "X4", c.online[4], 2, 3,
      insert_forwarding.MakeStatement(
          "SELECT MAX(start_time), COUNT(*) FROM CALL_FORWARDING WHERE s_id = (SELECT s_id FROM "
          "SUBSCRIBER WHERE sub_nbr = ?)",
          {"CALL_FORWARDING", "SUBSCRIBER"}, {}, {"nbr"})));
  c.hybrid.push_back(MakeHybrid(
      "X5", c.online[0], 1, 3,
      delete_forwarding.MakeStatement(
          "SELECT sf_type, COUNT(*) FROM CALL_FORWARDING GROUP BY sf_type ORDER BY sf_type",
          {"CALL_FORWARDING"}, {})));
  // Fuzzy search: subscribers whose number contains a digit substring.
  c.hybrid.push_back(MakeHybrid(
      "X6", c.online[3], 1, 2,
      get_subscriber.MakeStatement("SELECT s_id, sub_nbr FROM SUBSCRIBER WHERE sub_nbr LIKE ?",
                                   {"SUBSCRIBER"}, {}, {"fuzzy"})));
  return c;
}

}  // namespace olxp::suites
