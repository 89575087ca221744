#include <gtest/gtest.h>

#include <barrier>
#include <fstream>
#include <thread>

#include "facmon/crypto.hpp"
#include "facmon/error.hpp"
#include "facmon/storage.hpp"
#include "support.hpp"

using namespace facmon;
using facmon::testing::code_of;
using facmon::testing::Env;
using facmon::testing::receipt;
using facmon::testing::seed_reference;
using facmon::testing::TempDir;
using nlohmann::json;

namespace {


StoreOptions quick() {
  StoreOptions o;
  o.sync = false;
  return o;
}

Changeset put_one(const std::string& key, std::uint64_t expected, json doc) {
  Changeset cs;
  cs.actor = "tester";
  cs.action = "test.put";
  cs.put("thing", key, expected, std::move(doc));
  return cs;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Folds every audit entry's after-snapshot into a "kind/key" map.
std::map<std::string, json> replay(const Store& store) {
  std::map<std::string, json> state;
  auto last = store.snapshot()->last_seq();
  if (last == 0) return state;
  for (const auto& e : store.audit_range(1, last)) {
    auto after = store.resolve_audit_snapshot(e.after);
    for (const auto& [k, v] : after.items()) {
      if (v.is_null()) {
        state.erase(k);
      } else {
        state[k] = v;
      }
    }
  }
  return state;
}

}  // namespace

TEST(Storage, CommitIsVisibleAndDurable) {
  TempDir dir;
  {
    auto store = Store::open(dir / "d", quick());
    EXPECT_EQ(store->commit(put_one("a", 0, {{"v", 1}})), 1u);
    EXPECT_EQ(store->commit(put_one("a", 1, {{"v", 2}})), 2u);
    EXPECT_EQ((*store->snapshot()->find("thing", "a"))["v"], 2);
  }
  auto store = Store::open(dir / "d", quick());
  auto snap = store->snapshot();
  EXPECT_EQ((*snap->find("thing", "a"))["v"], 2);
  EXPECT_EQ(snap->version_of("thing", "a"), 2u);
  EXPECT_EQ(snap->last_seq(), 2u);
  auto audit = store->audit_range(1, 2);
  ASSERT_EQ(audit.size(), 2u);
  EXPECT_EQ(audit[0].actor, "tester");
  EXPECT_TRUE(audit[0].before["thing/a"].is_null());
  EXPECT_EQ(audit[1].before["thing/a"]["v"], 1);
}

TEST(Storage, OptimisticConcurrency) {
  TempDir dir;
  auto store = Store::open(dir / "d", quick());
  store->commit(put_one("a", 0, {{"v", 1}}));
  EXPECT_EQ(code_of([&] { store->commit(put_one("a", 0, {{"v", 9}})); }), ErrorCode::CONFLICT);
  EXPECT_EQ(code_of([&] { store->commit(put_one("a", 5, {{"v", 9}})); }), ErrorCode::CONFLICT);
  auto cs = put_one("b", 0, {{"v", 1}});
  cs.expect("thing", "a", 7);
  EXPECT_EQ(code_of([&] { store->commit(cs); }), ErrorCode::CONFLICT);
  EXPECT_EQ(store->snapshot()->find("thing", "b"), nullptr);
  EXPECT_EQ(store->snapshot()->last_seq(), 1u);
}

TEST(Storage, MalformedChangesetsAreRejected) {
  TempDir dir;
  auto store = Store::open(dir / "d", quick());
  Changeset empty;
  empty.action = "x";
  EXPECT_EQ(code_of([&] { store->commit(empty); }), ErrorCode::CONSTRAINT_VIOLATION);
  auto twice = put_one("a", 0, {{"v", 1}});
  twice.put("thing", "a", 0, {{"v", 2}});
  EXPECT_EQ(code_of([&] { store->commit(twice); }), ErrorCode::CONSTRAINT_VIOLATION);
  EXPECT_EQ(code_of([&] { store->commit(put_one("a", 0, json::array())); }),
            ErrorCode::CONSTRAINT_VIOLATION);
}

class CrashRecovery : public ::testing::TestWithParam<CrashPoint> {};

TEST_P(CrashRecovery, CommitIsAllOrNothing) {
  TempDir dir;
  {
    auto options = quick();
    options.crash_point = GetParam();
    options.crash_on_commit = 2;
    auto store = Store::open(dir / "d", options);
    store->commit(put_one("a", 0, {{"v", 1}}));
    auto cs = put_one("a", 1, {{"v", 2}});
    cs.put("thing", "b", 0, {{"v", 1}});
    EXPECT_THROW(store->commit(cs), SimulatedCrash);
  }
  auto store = Store::open(dir / "d", quick());
  auto snap = store->snapshot();
  bool durable = GetParam() == CrashPoint::AfterJournalSync;
  EXPECT_EQ(snap->last_seq(), durable ? 2u : 1u);
  EXPECT_EQ((*snap->find("thing", "a"))["v"], durable ? 2 : 1);
  EXPECT_EQ(snap->find("thing", "b") != nullptr, durable);
  EXPECT_EQ(store->audit_range(1, 10).size(), durable ? 2u : 1u);
  // The store keeps working after recovery.
  EXPECT_EQ(store->commit(put_one("c", 0, {{"v", 1}})), snap->last_seq() + 1);
}

INSTANTIATE_TEST_SUITE_P(AllPoints, CrashRecovery,
                         ::testing::Values(CrashPoint::BeforeJournalWrite,
                                           CrashPoint::MidJournalWrite,
                                           CrashPoint::AfterJournalSync));

TEST(Storage, DamagedRecordInsideJournalIsCorruption) {
  TempDir dir;
  {
    auto store = Store::open(dir / "d", quick());
    for (int i = 0; i < 3; ++i) store->commit(put_one("k" + std::to_string(i), 0, {{"v", i}}));
  }
  auto path = dir / "d" / "journal.log";
  auto content = slurp(path);
  auto second = content.find('\n', content.find('\n') + 1) + 12;
  content[second] = content[second] == 'x' ? 'y' : 'x';
  std::ofstream(path, std::ios::binary | std::ios::trunc) << content;
  EXPECT_EQ(code_of([&] { Store::open(dir / "d", quick()); }), ErrorCode::CORRUPT_STORE);
}

TEST(Storage, TornTailIsDiscarded) {
  TempDir dir;
  {
    auto store = Store::open(dir / "d", quick());
    store->commit(put_one("a", 0, {{"v", 1}}));
  }
  std::ofstream(dir / "d" / "journal.log", std::ios::binary | std::ios::app) << "deadbeef {\"type\":\"com";
  auto store = Store::open(dir / "d", quick());
  EXPECT_EQ(store->snapshot()->last_seq(), 1u);
  EXPECT_EQ(store->commit(put_one("b", 0, {{"v", 1}})), 2u);
}

TEST(Storage, DirectoryLockIsExclusive) {
  TempDir dir;
  auto store = Store::open(dir / "d", quick());
  EXPECT_EQ(code_of([&] { Store::open(dir / "d", quick()); }), ErrorCode::DATA_DIR_LOCKED);
}

TEST(Storage, UnwritableDirectory) {
  TempDir dir;
  std::ofstream(dir / "file") << "x";
  EXPECT_EQ(code_of([&] { Store::open(dir / "file" / "d", quick()); }), ErrorCode::DATA_DIR_UNWRITABLE);
}

TEST(Storage, Blobs) {
  TempDir dir;
  auto store = Store::open(dir / "d", quick());
  std::string bytes = "\x89PNG\r\n\x1A\n some bytes";
  auto h1 = store->put_blob(bytes);
  auto h2 = store->put_blob(bytes);
  EXPECT_EQ(h1, h2);
  EXPECT_EQ(h1, crypto::sha256_hex(bytes));
  EXPECT_EQ(store->get_blob(h1), bytes);
  EXPECT_EQ(code_of([&] { (void)store->get_blob(crypto::sha256_hex(std::string("other"))); }),
            ErrorCode::UNKNOWN_BLOB);
  EXPECT_EQ(code_of([&] { store->put_blob(""); }), ErrorCode::EMPTY_PAYLOAD);
  auto path = dir / "d" / "blobs" / h1.substr(0, 2) / h1;
  std::ofstream(path, std::ios::binary | std::ios::trunc) << "tampered";
  EXPECT_EQ(code_of([&] { (void)store->get_blob(h1); }), ErrorCode::CORRUPT_STORE);
}

TEST(Storage, AuditRangeAndOverflow) {
  TempDir dir;
  auto store = Store::open(dir / "d", quick());
  EXPECT_TRUE(store->audit_range(1, 100).empty());
  EXPECT_EQ(code_of([&] { (void)store->audit_range(5, 1); }), ErrorCode::INVALID_RANGE);

  json big{{"text", std::string(100 * 1024, 'z')}};
  store->commit(put_one("big", 0, big));
  auto entry = store->audit_range(1, 1).at(0);
  EXPECT_TRUE(entry.after.contains("overflow_blob"));
  EXPECT_LE(entry.after.dump().size(), kAuditSnapshotLimit);
  EXPECT_EQ(store->resolve_audit_snapshot(entry.after)["thing/big"], big);
}

TEST(Storage, ArchiveRoundTripIsByteIdentical) {
  TempDir dir;
  std::string first;
  {
    auto store = Store::open(dir / "d", quick());
    store->commit(put_one("a", 0, {{"v", 1}}));
    store->commit(put_one("a", 1, {{"v", 2}}));
    store->put_blob("blob bytes");
    Changeset del;
    del.action = "test.erase";
    del.erase("thing", "a", 2);
    store->commit(del);
    first = store->export_archive();
  }
  auto restored = Store::restore(dir / "r", first, quick());
  EXPECT_EQ(restored->export_archive(), first);
  EXPECT_EQ(restored->get_blob(crypto::sha256_hex(std::string("blob bytes"))), "blob bytes");
  EXPECT_EQ(restored->snapshot()->last_seq(), 3u);
  EXPECT_EQ(restored->commit(put_one("n", 0, {{"v", 1}})), 4u);
  restored.reset();
  auto reopened = Store::open(dir / "r", quick());
  EXPECT_EQ(reopened->snapshot()->last_seq(), 4u);
  reopened.reset();
  EXPECT_EQ(code_of([&] { Store::restore(dir / "r", first, quick()); }), ErrorCode::INVALID_ARGUMENT);
}

TEST(Storage, AuditReplayReconstructsState) {
  Env env;
  seed_reference(env.s());
  auto actor = Actor::system();
  for (int i = 0; i < 5; ++i) env.s().registry.register_item(receipt("R-" + std::to_string(i)), actor, env.today);
  env.s().lifecycle.transfer_item("R-1", {"B", "B.201"}, actor, env.today);
  env.s().lifecycle.change_status("R-2", LifecycleEvent::REPORT_HEAVY_DAMAGE, actor, env.today);
  env.s().registry.deactivate_reference(ReferenceKind::BRAND, "LG", actor);
  EXPECT_EQ(replay(*env.store), env.store->snapshot()->flatten());
}

TEST(Storage, ConcurrentTransfersHaveExactlyOneWinner) {
  std::barrier sync(2);
  StoreOptions options;
  std::atomic<bool> armed{false};
  options.before_commit = [&] {
    if (armed) sync.arrive_and_wait();
  };
  Env env(Date(2026, 6, 15), options);
  seed_reference(env.s());
  env.s().registry.register_item(receipt("X-1"), Actor::system(), env.today);
  armed = true;

  std::atomic<int> wins{0};
  std::atomic<int> conflicts{0};
  auto attempt = [&](const char* room) {
    try {
      env.s().lifecycle.transfer_item("X-1", {"B", room}, Actor::system(), env.today);
      ++wins;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CONFLICT) ++conflicts;
    }
  };
  std::thread t1(attempt, "B.201");
  std::thread t2(attempt, "B.202");
  t1.join();
  t2.join();
  EXPECT_EQ(wins, 1);
  EXPECT_EQ(conflicts, 1);
  EXPECT_EQ(env.catalog().all<json>(kind::kTransfer).size(), 1u);
}
