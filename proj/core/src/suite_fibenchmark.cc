// fibenchmark: banking (SmallBank online side).

#include "suites.h"

namespace olxp::suites {
namespace {

std::vector<TableDef> Tables() {
  const auto i = SqlType::Integer();
  const auto money = SqlType::Decimal(12, 2);
  const Cardinality per_account{kAccountsPerScale, true};
  return {
      {"ACCOUNT",
       {Col("custid", i), Col("name", SqlType::Varchar(64))},
       {"custid"},
       {{"IDX_ACCOUNT_NAME", {"name"}}},
       {},
       per_account},
      {"SAVING",
       {Col("custid", i), Col("bal", money)},
       {"custid"},
       {{"IDX_SAVING_BAL", {"bal"}}},
       {{{"custid"}, "ACCOUNT", {"custid"}}},
       per_account},
      {"CHECKING",
       {Col("custid", i), Col("bal", money)},
       {"custid"},
       {{"IDX_CHECKING_BAL", {"bal"}}, {"IDX_CHECKING_CUSTID_BAL", {"custid", "bal"}}},
       {{{"custid"}, "ACCOUNT", {"custid"}}},
       per_account},
  };
}

TxnBuilder Online(const char* name, int64_t weight) {
  TxnBuilder b(name, WorkloadClass::kOnline, weight);
  b.Var("a1", ScaledIdGen{"ACCOUNT"})
      .Var("a2", ScaledIdGen{"ACCOUNT"})
      .Var("amount", UniformDecimalGen{1.0, 100.0, 2});
  return b;
}

}  // namespace

BenchmarkCatalog Fibenchmark() {
  BenchmarkCatalog c;
  c.name = "fibenchmark";
  c.tables = Tables();

  TxnBuilder amalgamate = Online("Amalgamate", 17);
  amalgamate.Stmt("SELECT bal FROM SAVING WHERE custid = ?", {"SAVING"}, {}, {"a1"})
      .Stmt("SELECT bal FROM CHECKING WHERE custid = ?", {"CHECKING"}, {}, {"a1"})
      .Stmt("UPDATE CHECKING SET bal = bal + (SELECT s.bal FROM SAVING s WHERE s.custid = ?) + "
            "(SELECT c.bal FROM CHECKING c WHERE c.custid = ?) WHERE custid = ?",
            {"SAVING", "CHECKING"}, {"CHECKING"}, {"a1", "a1", "a2"})
      .Stmt("UPDATE SAVING SET bal = 0 WHERE custid = ?", {}, {"SAVING"}, {"a1"})
      .Stmt("UPDATE CHECKING SET bal = 0 WHERE custid = ?", {}, {"CHECKING"}, {"a1"})
      // Touches the receiving customer's account row so ACCOUNT is OLTP-written.
      .Stmt("UPDATE ACCOUNT SET name = name WHERE custid = ?", {}, {"ACCOUNT"}, {"a2"});

  TxnBuilder balance = Online("Balance", 15);
  balance.Stmt("SELECT a.name, s.bal + c.bal FROM ACCOUNT a, SAVING s, CHECKING c WHERE "
               "a.custid = ? AND s.custid = a.custid AND c.custid = a.custid",
               {"ACCOUNT", "SAVING", "CHECKING"}, {}, {"a1"});

  TxnBuilder deposit = Online("DepositChecking", 17);
  deposit.Stmt("SELECT name FROM ACCOUNT WHERE custid = ?", {"ACCOUNT"}, {}, {"a1"})
      .Stmt("UPDATE CHECKING SET bal = bal + ? WHERE custid = ?", {}, {"CHECKING"},
            {"amount", "a1"});

  TxnBuilder send = Online("SendPayment", 17);
  send.Stmt("SELECT bal FROM CHECKING WHERE custid = ?", {"CHECKING"}, {}, {"a1"})
      .Stmt("UPDATE CHECKING SET bal = bal - ? WHERE custid = ?", {}, {"CHECKING"},
            {"amount", "a1"})
      .Stmt("UPDATE CHECKING SET bal = bal + ? WHERE custid = ?", {}, {"CHECKING"},
            {"amount", "a2"});

  TxnBuilder transact = Online("TransactSavings", 17);
  transact.Stmt("SELECT bal FROM SAVING WHERE custid = ?", {"SAVING"}, {}, {"a1"})
      .Stmt("UPDATE SAVING SET bal = bal + ? WHERE custid = ?", {}, {"SAVING"}, {"amount", "a1"});

  TxnBuilder write_check = Online("WriteCheck", 17);
  write_check
      .Stmt("SELECT s.bal + c.bal FROM SAVING s, CHECKING c WHERE s.custid = ? AND "
            "c.custid = s.custid",
            {"SAVING", "CHECKING"}, {}, {"a1"})
      // Overdraft penalty of 1 when the combined balance does not cover the cheque.
      .Stmt("UPDATE CHECKING SET bal = bal - ? - CASE WHEN bal + (SELECT s.bal FROM SAVING s "
            "WHERE s.custid = ?) < ? THEN 1 ELSE 0 END WHERE custid = ?",
            {"SAVING"}, {"CHECKING"}, {"amount", "a1", "amount", "a1"});

  for (auto* b : {&amalgamate, &balance, &deposit, &send, &transact, &write_check}) {
    c.online.push_back(b->Build());
  }

  auto q = [](const char* name) {
    TxnBuilder b(name, WorkloadClass::kAnalytical, 1);
    b.Var("threshold", UniformDecimalGen{0.0, 10000.0, 2});
    return b;
  };
  // Account name query: names joined with their checking rows.
  c.analytical.push_back(q("Q1").Stmt("SELECT a.name, c.bal FROM ACCOUNT a, CHECKING c WHERE "
                                      "a.custid = c.custid AND c.bal > ? ORDER BY c.bal DESC "
                                      "LIMIT 100",
                                      {"ACCOUNT", "CHECKING"}, {}, {"threshold"})
                                   .Build());
  c.analytical.push_back(
      q("Q2").Stmt("SELECT CASE WHEN s.bal + c.bal < 0 THEN 'negative' WHEN s.bal + c.bal < 1000 "
                   "THEN 'low' WHEN s.bal + c.bal < 10000 THEN 'middle' ELSE 'high' END AS tier, "
                   "COUNT(*), SUM(s.bal + c.bal), AVG(c.bal) FROM SAVING s, CHECKING c WHERE "
                   "s.custid = c.custid GROUP BY tier ORDER BY tier",
                   {"SAVING", "CHECKING"}, {})
          .Build());
  c.analytical.push_back(q("Q3").Stmt("SELECT COUNT(*), SUM(s.bal) FROM SAVING s WHERE s.bal > "
                                      "(SELECT AVG(c.bal) FROM CHECKING c)",
                                      {"SAVING", "CHECKING"}, {})
                                   .Build());
  c.analytical.push_back(q("Q4").Stmt("SELECT a.custid, a.name, s.bal + c.bal AS total FROM "
                                      "ACCOUNT a, SAVING s, CHECKING c WHERE s.custid = a.custid "
                                      "AND c.custid = a.custid ORDER BY total DESC LIMIT 10",
                                      {"ACCOUNT", "SAVING", "CHECKING"}, {})
                                   .Build());

  auto rt = [](TxnBuilder& b, const char* sql, TableSet reads,
               std::initializer_list<const char*> params = {}) {
    b.Var("floor", UniformDecimalGen{0.0, 5000.0, 2});
    return b.MakeStatement(sql, reads, {}, params);
  };
  c.hybrid.push_back(MakeHybrid("X1", c.online[0], 0, 16,
                                rt(amalgamate, "SELECT AVG(bal), COUNT(*) FROM CHECKING",
                                   {"CHECKING"})));
  c.hybrid.push_back(MakeHybrid("X2", c.online[1], 0, 20,
                                rt(balance, "SELECT MAX(bal) FROM SAVING", {"SAVING"})));
  c.hybrid.push_back(MakeHybrid(
      "X3", c.online[2], 1, 16,
      rt(deposit, "SELECT SUM(bal) FROM CHECKING WHERE bal > ?", {"CHECKING"}, {"floor"})));
  c.hybrid.push_back(MakeHybrid(
      "X4", c.online[3], 1, 16,
      rt(send, "SELECT COUNT(*) FROM CHECKING WHERE bal < ?", {"CHECKING"}, {"amount"})));
  c.hybrid.push_back(MakeHybrid("X5", c.online[4], 1, 16,
                                rt(transact, "SELECT AVG(bal), MIN(bal) FROM SAVING", {"SAVING"})));
  // Checking balance transaction: is the cheque covered, and what is the
  // smallest savings balance right now.
  c.hybrid.push_back(MakeHybrid("X6", c.online[5], 1, 16,
                                rt(write_check, "SELECT MIN(bal) FROM SAVING", {"SAVING"})));
  return c;
}

}  // namespace olxp::suites
