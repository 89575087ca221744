#include <gtest/gtest.h>

#include <random>

#include "facmon/lifecycle.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace facmon;
using facmon::testing::code_of;
using facmon::testing::Env;
using facmon::testing::receipt;
using facmon::testing::seed_reference;
using facmon::testing::table_next;
using facmon::testing::walk_days;

namespace {

const Actor kActor = Actor::system();

struct Fixture : ::testing::Test {
  Env env;
  void SetUp() override { seed_reference(env.s()); }
  Lifecycle& life() { return env.s().lifecycle; }
  Registry& reg() { return env.s().registry; }
  Item add(const std::string& barcode) { return reg().register_item(receipt(barcode), kActor, env.today); }
};

using LifecycleTest = Fixture;

}  // namespace

TEST_F(LifecycleTest, TransferMovesItemAndRecordsIt) {
  add("T-1");
  auto rec = life().transfer_item("T-1", {"B", "B.201"}, kActor, env.today, "pindah");
  auto cat = env.catalog();
  EXPECT_EQ(cat.address_of(rec.from_location_id).location_code, "A.101");
  EXPECT_EQ(cat.address_of(rec.to_location_id).location_code, "B.201");
  life().transfer_item("T-1", {"b", "b.202"}, kActor, env.today);
  EXPECT_EQ(env.catalog().address_of(reg().get_item("T-1").location_id).location_code, "B.202");
  EXPECT_EQ(code_of([&] { life().transfer_item("T-1", {"B", "B.202"}, kActor, env.today); }),
            ErrorCode::SAME_LOCATION);
  EXPECT_EQ(code_of([&] { life().transfer_item("T-1", {"B", "B.999"}, kActor, env.today); }),
            ErrorCode::UNKNOWN_LOCATION);
  EXPECT_EQ(code_of([&] { life().transfer_item("NOPE", {"B", "B.201"}, kActor, env.today); }),
            ErrorCode::UNKNOWN_ITEM);
  life().change_status("T-1", LifecycleEvent::DONATE, kActor, env.today);
  EXPECT_EQ(code_of([&] { life().transfer_item("T-1", {"A", "A.101"}, kActor, env.today); }),
            ErrorCode::TERMINAL_ITEM);
}

TEST_F(LifecycleTest, RandomTransferSequenceReplays) {
  add("T-2");
  std::mt19937 rng(9);
  const LocationAddress rooms[] = {{"A", "A.101"}, {"A", "A.102"}, {"B", "B.201"}, {"B", "B.202"}};
  std::string current = "A.101";
  int k = 0;
  for (int i = 0; i < 40; ++i) {
    const auto& target = rooms[rng() % 4];
    if (target.location_code == current) continue;
    life().transfer_item("T-2", target, kActor, env.today);
    current = target.location_code;
    ++k;
  }
  auto item = reg().get_item("T-2");
  EXPECT_EQ(env.catalog().address_of(item.location_id).location_code, current);
  auto hist = life().history("T-2");
  EXPECT_EQ(static_cast<int>(hist.transfers.size()), k);
  EXPECT_EQ(hist.transfers.back().to_location_id, item.location_id);
}

TEST_F(LifecycleTest, RandomEventSequencesFoldTheTable) {
  std::mt19937 rng(13);
  for (int n = 0; n < 30; ++n) {
    auto barcode = "S-" + std::to_string(n);
    add(barcode);
    Condition expected = Condition::GOOD;
    for (int step = 0; step < 12; ++step) {
      auto event = kAllEvents[rng() % kAllEvents.size()];
      auto next = table_next(expected, event);
      if (next) {
        auto sc = life().change_status(barcode, event, kActor, env.today);
        EXPECT_EQ(sc.from, expected);
        EXPECT_EQ(sc.to, *next);
        expected = *next;
      } else {
        EXPECT_EQ(code_of([&] { life().change_status(barcode, event, kActor, env.today); }),
                  ErrorCode::ILLEGAL_TRANSITION);
      }
    }
    auto item = reg().get_item(barcode);
    EXPECT_EQ(item.condition, expected);
    auto hist = life().history(barcode);
    if (hist.status_changes.empty()) {
      EXPECT_EQ(expected, Condition::GOOD);
    } else {
      EXPECT_EQ(hist.status_changes.back().to, item.condition);
      for (const auto& sc : hist.status_changes) EXPECT_EQ(table_next(sc.from, sc.event), sc.to);
    }
  }
}

TEST_F(LifecycleTest, RepairWorkflow) {
  add("R-1");
  EXPECT_EQ(code_of([&] { life().open_repair("R-1", env.today, "x", kActor); }), ErrorCode::NOT_DAMAGED);
  life().change_status("R-1", LifecycleEvent::REPORT_LIGHT_DAMAGE, kActor, Date(2026, 6, 1));
  auto repair = life().open_repair("R-1", Date(2026, 6, 2), "ganti kompresor", kActor);
  EXPECT_EQ(repair.status, RepairStatus::OPEN);
  EXPECT_EQ(reg().get_item("R-1").open_repair_id, repair.id);
  EXPECT_EQ(code_of([&] { life().open_repair("R-1", env.today, "again", kActor); }),
            ErrorCode::REPAIR_ALREADY_OPEN);
  EXPECT_EQ(code_of([&] { life().complete_repair(repair.id, Date(2026, 6, 1), std::nullopt, kActor); }),
            ErrorCode::INVALID_DATE_ORDER);
  auto done = life().complete_repair(repair.id, Date(2026, 6, 5), Money::parse("150000"), kActor);
  EXPECT_EQ(done.status, RepairStatus::COMPLETED);
  EXPECT_EQ(done.completed_date, Date(2026, 6, 5));
  auto item = reg().get_item("R-1");
  EXPECT_EQ(item.condition, Condition::GOOD);
  EXPECT_FALSE(item.open_repair_id);
  EXPECT_EQ(code_of([&] { life().complete_repair(repair.id, Date(2026, 6, 6), std::nullopt, kActor); }),
            ErrorCode::ALREADY_COMPLETED);
  EXPECT_EQ(code_of([&] { life().complete_repair("rep_missing", Date(2026, 6, 6), std::nullopt, kActor); }),
            ErrorCode::UNKNOWN_REPAIR);
  auto hist = life().history("R-1");
  ASSERT_EQ(hist.status_changes.size(), 2u);
  EXPECT_EQ(hist.status_changes.back().event, LifecycleEvent::REPAIR_COMPLETE);
}

TEST_F(LifecycleTest, RepairCompletionIsOneCommit) {
  add("R-2");
  life().change_status("R-2", LifecycleEvent::REPORT_HEAVY_DAMAGE, kActor, env.today);
  auto repair = life().open_repair("R-2", env.today, "x", kActor);
  auto before = env.store->snapshot()->last_seq();
  life().complete_repair(repair.id, env.today, std::nullopt, kActor);
  EXPECT_EQ(env.store->snapshot()->last_seq(), before + 1);
}

TEST_F(LifecycleTest, LosingAnItemCancelsItsOpenRepair) {
  add("R-3");
  life().change_status("R-3", LifecycleEvent::REPORT_HEAVY_DAMAGE, kActor, env.today);
  auto repair = life().open_repair("R-3", env.today, "x", kActor);
  life().change_status("R-3", LifecycleEvent::REPORT_LOST, kActor, env.today);
  EXPECT_EQ(life().get_repair(repair.id).status, RepairStatus::CANCELLED);
  EXPECT_FALSE(reg().get_item("R-3").open_repair_id);
}

TEST_F(LifecycleTest, WarrantyReportPartitionsNonTerminalItems) {
  Date as_of(2026, 6, 15);
  reg().register_item(receipt("W-NONE"), kActor, as_of);
  reg().register_item(receipt("W-EDGE", "A", "A.101", Date(2025, 1, 1), as_of), kActor, as_of);
  reg().register_item(receipt("W-OLD", "A", "A.101", Date(2025, 1, 1), Date(2026, 1, 1)), kActor, as_of);
  reg().register_item(receipt("W-GONE", "A", "A.101", Date(2025, 1, 1), Date(2027, 1, 1)), kActor, as_of);
  life().change_status("W-GONE", LifecycleEvent::DONATE, kActor, as_of);
  auto w = life().warranty_report(as_of);
  ASSERT_EQ(w.in_warranty.size(), 1u);
  EXPECT_EQ(w.in_warranty[0].item.barcode, "W-EDGE");
  EXPECT_EQ(w.in_warranty[0].days, 0);
  ASSERT_EQ(w.expired.size(), 1u);
  EXPECT_EQ(w.expired[0].days, walk_days(Date(2026, 1, 1), as_of));
  ASSERT_EQ(w.none.size(), 1u);
  EXPECT_EQ(w.none[0].barcode, "W-NONE");
}

TEST_F(LifecycleTest, MaintenanceDueCalendarExamples) {
  reg().register_item(receipt("AC-1", "A", "A.101", Date(2018, 1, 1), std::nullopt, 90), kActor, Date(2018, 1, 1));
  reg().register_item(receipt("NO-INT", "A", "A.101", Date(2010, 1, 1)), kActor, Date(2018, 1, 1));
  EXPECT_TRUE(life().maintenance_due(Date(2018, 3, 31)).empty());
  auto due = life().maintenance_due(Date(2018, 4, 1));
  ASSERT_EQ(due.size(), 1u);
  EXPECT_EQ(due[0].item.barcode, "AC-1");
  EXPECT_EQ(due[0].days_overdue, 0);
  EXPECT_EQ(due[0].due_date, Date(2018, 4, 1));
  EXPECT_EQ(life().maintenance_due(Date(2018, 4, 11))[0].days_overdue, 10);

  // A completed repair moves the anchor.
  life().change_status("AC-1", LifecycleEvent::REPORT_LIGHT_DAMAGE, kActor, Date(2018, 4, 2));
  auto rep = life().open_repair("AC-1", Date(2018, 4, 2), "service", kActor);
  life().complete_repair(rep.id, Date(2018, 4, 3), std::nullopt, kActor);
  EXPECT_TRUE(life().maintenance_due(Date(2018, 7, 1)).empty());
  EXPECT_EQ(life().maintenance_due(Date(2018, 7, 2)).size(), 1u);
}

TEST_F(LifecycleTest, MaintenanceOrderingMostOverdueFirst) {
  reg().register_item(receipt("M-B", "A", "A.101", Date(2018, 1, 1), std::nullopt, 30), kActor, env.today);
  reg().register_item(receipt("M-A", "A", "A.101", Date(2018, 1, 1), std::nullopt, 30), kActor, env.today);
  reg().register_item(receipt("M-C", "A", "A.101", Date(2017, 1, 1), std::nullopt, 30), kActor, env.today);
  auto due = life().maintenance_due(Date(2018, 6, 1));
  ASSERT_EQ(due.size(), 3u);
  EXPECT_EQ(due[0].item.barcode, "M-C");
  EXPECT_EQ(due[1].item.barcode, "M-A");
  EXPECT_EQ(due[2].item.barcode, "M-B");
}
