#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "cli_support.hpp"
#include "facmon/csv.hpp"

using namespace facmon;
using namespace facmon::testing;

namespace {

struct CliTest : ::testing::Test {
  TempDir scratch;
  std::string data() const { return "--data-dir " + shell_quote((scratch / "data").string()); }
  CliResult run(const std::string& args, const std::string& in = "") {
    return run_cli(scratch, data() + " " + args, in);
  }
  std::string write(const std::string& name, const std::string& body) {
    auto p = scratch / name;
    std::ofstream(p, std::ios::binary) << body;
    return shell_quote(p.string());
  }
  std::string item_line(const std::string& barcode, const std::string& loc = "A.101") {
    return barcode + ",Kursi lipat,\"besi, hitam\",C02,FUR,GEN,BUY,2025-03-01,,," + loc.substr(0, 1) + "," + loc + ",Pak Andi\n";
  }
};

}  // namespace

TEST_F(CliTest, SeedPrintsCategoryCountOnce) {
  auto r = run("seed");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "20 categories\n");
  auto again = run("seed");
  EXPECT_EQ(again.exit_code, 1);
  EXPECT_NE(again.err.find("ALREADY_SEEDED"), std::string::npos) << again.err;
}

TEST_F(CliTest, ImportIsAllOrNothing) {
  ASSERT_EQ(run("seed --demo").exit_code, 0);
  std::string header = std::string(csv::kItemHeader) + "\n";
  auto bad = write("bad.csv", header + item_line("K-1") + item_line("K-2") + item_line("K-1"));
  auto r = run("import items " + bad);
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
  auto list = run("--output json item list");
  ASSERT_EQ(list.exit_code, 0) << list.err;
  EXPECT_TRUE(nlohmann::json::parse(list.out).empty());

  auto empty = run("import items " + write("empty.csv", header));
  EXPECT_EQ(empty.exit_code, 0) << empty.err;
  EXPECT_EQ(empty.out, "0 items imported\n");

  auto good = run("import items " + write("good.csv", header + item_line("K-1") + item_line("K-2", "B.201")));
  EXPECT_EQ(good.exit_code, 0) << good.err;
  EXPECT_EQ(good.out, "2 items imported\n");
}

TEST_F(CliTest, ExportImportExportIsByteIdentical) {
  ASSERT_EQ(run("seed --demo").exit_code, 0);
  std::string body = std::string(csv::kItemHeader) + "\n" + item_line("X-2") + item_line("X-1", "B.201") +
                     "X-3,\"Meja \"\"rapat\"\"\",,C03,FUR,GEN,GRANT,2024-12-31,2027-01-01,180,A,A.101,\n";
  ASSERT_EQ(run("import items " + write("in.csv", body)).exit_code, 0);
  auto first = scratch / "first.csv";
  ASSERT_EQ(run("export items " + shell_quote(first.string())).exit_code, 0);

  TempDir other;
  auto other_data = "--data-dir " + shell_quote((other / "data").string());
  ASSERT_EQ(run_cli(scratch, other_data + " seed --demo").exit_code, 0);
  auto re = run_cli(scratch, other_data + " import items " + shell_quote(first.string()));
  ASSERT_EQ(re.exit_code, 0) << re.err;
  auto second = scratch / "second.csv";
  ASSERT_EQ(run_cli(scratch, other_data + " export items " + shell_quote(second.string())).exit_code, 0);
  EXPECT_EQ(slurp(first), slurp(second));
  EXPECT_EQ(csv::parse(slurp(first)).size(), 4u);
}

TEST_F(CliTest, ItemCommandsAndJsonOutput) {
  ASSERT_EQ(run("seed --demo").exit_code, 0);
  auto reg = run("--output json item register --name 'AC Split' --category C01 --type ELK --brand GEN "
                 "--source BUY --purchase-date 2025-05-05 --campus A --location A.101");
  ASSERT_EQ(reg.exit_code, 0) << reg.err;
  auto item = nlohmann::json::parse(reg.out);
  auto barcode = item["barcode"].get<std::string>();
  EXPECT_EQ(barcode, "A-C01-00001");
  EXPECT_EQ(item["condition"], "GOOD");

  auto dmg = run("item status " + barcode + " --event REPORT_LIGHT_DAMAGE");
  EXPECT_EQ(dmg.exit_code, 0) << dmg.err;
  auto donate = run("item status " + barcode + " --event DONATE");
  EXPECT_EQ(donate.exit_code, 1);
  EXPECT_NE(donate.err.find("ILLEGAL_TRANSITION"), std::string::npos);
  auto moved = run("item transfer " + barcode + " --campus B --location B.201");
  EXPECT_EQ(moved.exit_code, 0) << moved.err;
  auto got = run("--output json item get " + barcode);
  ASSERT_EQ(got.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(got.out)["condition"], "LIGHT_DAMAGE");

  auto summary = run("--output json report summary --from 2026-01-01 --to 2026-12-31");
  ASSERT_EQ(summary.exit_code, 0) << summary.err;
  EXPECT_EQ(nlohmann::json::parse(summary.out)["items_total"], 1);
  auto table = run("item list");
  EXPECT_EQ(table.exit_code, 0);
  EXPECT_NE(table.out.find(barcode), std::string::npos);
}

TEST_F(CliTest, UsersTakePasswordsFromStdin) {
  ASSERT_EQ(run("seed --demo").exit_code, 0);
  auto add = run("user add unit_b --role WORK_UNIT --work-unit 'Unit B' --location B/B.201 --password-stdin",
                 "stdin-secret-771\n");
  EXPECT_EQ(add.exit_code, 0) << add.err;
  auto list = run("--output json user list");
  ASSERT_EQ(list.exit_code, 0);
  EXPECT_EQ(list.out.find("stdin-secret-771"), std::string::npos);
  EXPECT_EQ(list.out.find("argon2"), std::string::npos);
  auto users = nlohmann::json::parse(list.out);
  ASSERT_EQ(users.size(), 1u);
  EXPECT_EQ(users[0]["role"], "WORK_UNIT");
  auto weak = run("user add weak_one --role LEADERSHIP --password-stdin", "short\n");
  EXPECT_EQ(weak.exit_code, 1);
  EXPECT_NE(weak.err.find("WEAK_PASSWORD"), std::string::npos);
}

TEST_F(CliTest, BadArgumentsFailCleanly) {
  EXPECT_NE(run("frobnicate").exit_code, 0);
  auto r = run("export items");
  EXPECT_NE(r.exit_code, 0);
}
