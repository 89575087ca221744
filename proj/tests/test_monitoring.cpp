#include <gtest/gtest.h>

#include <random>

#include "world.hpp"

using namespace facmon;
using namespace facmon::testing;

namespace {

struct MonitoringTest : ::testing::Test {
  Env env;
  Actor admin = Actor::system();
  void SetUp() override { seed_reference(env.s()); }
  Monitoring& mon() { return env.s().monitoring; }

  Actor make_user(const std::string& name, Role role) {
    NewUser nu;
    nu.username = name;
    nu.password = "long-enough-password";
    nu.role = role;
    if (role == Role::WORK_UNIT) {
      nu.work_unit_name = "Unit";
      nu.locations = {{"A", "A.101"}};
    }
    return to_actor(env.s().auth.add_user(nu, admin));
  }

  FindingInput global(Date date, std::string loc = "A.101") {
    FindingInput in;
    in.object_name = "Plafon";
    in.date = date;
    in.location = LocationAddress{loc.substr(0, 1), loc};
    in.finding = "Plafon retak";
    in.recommendation = "Ganti panel";
    return in;
  }
};

}  // namespace

TEST_F(MonitoringTest, SubmitFollowUpResolve) {
  env.s().registry.register_item(receipt("AC-01"), admin, env.today);
  FindingInput in;
  in.barcode = "ac-01";
  in.date = Date(2026, 6, 1);
  in.finding = "  AC tidak dingin ";
  in.recommendation = "Isi freon";
  auto rec = mon().submit_finding(in, admin);
  EXPECT_EQ(rec.barcode, "AC-01");
  EXPECT_EQ(rec.object_name, "Item AC-01");
  EXPECT_EQ(rec.finding, "AC tidak dingin");
  EXPECT_EQ(rec.status, FindingStatus::OPEN);
  EXPECT_EQ(env.catalog().address_of(rec.location_id).location_code, "A.101");

  auto fu = mon().follow_up(rec.id, "teknisi dijadwalkan", admin);
  EXPECT_EQ(fu.status, FindingStatus::FOLLOW_UP);
  EXPECT_EQ(code_of([&] { mon().follow_up(rec.id, "again", admin); }), ErrorCode::WRONG_STATE);
  EXPECT_EQ(code_of([&] { mon().resolve(rec.id, Date(2026, 5, 31), admin); }),
            ErrorCode::INVALID_DATE_ORDER);
  auto done = mon().resolve(rec.id, Date(2026, 6, 1), admin);
  EXPECT_EQ(done.status, FindingStatus::RESOLVED);
  EXPECT_EQ(done.resolution_date, Date(2026, 6, 1));
  EXPECT_EQ(code_of([&] { mon().resolve(rec.id, Date(2026, 6, 2), admin); }), ErrorCode::WRONG_STATE);
  EXPECT_EQ(mon().get_record(rec.id), done);
}

TEST_F(MonitoringTest, ResolveStraightFromOpen) {
  auto rec = mon().submit_finding(global(Date(2026, 3, 3)), admin);
  EXPECT_EQ(mon().resolve(rec.id, Date(2026, 3, 10), admin).status, FindingStatus::RESOLVED);
}

TEST_F(MonitoringTest, SubmitValidation) {
  auto in = global(env.today);
  in.finding = "   ";
  EXPECT_EQ(code_of([&] { mon().submit_finding(in, admin); }), ErrorCode::EMPTY_FINDING);
  in = global(env.today);
  in.location.reset();
  EXPECT_EQ(code_of([&] { mon().submit_finding(in, admin); }), ErrorCode::UNKNOWN_LOCATION);
  in = global(env.today, "A.999");
  EXPECT_EQ(code_of([&] { mon().submit_finding(in, admin); }), ErrorCode::UNKNOWN_LOCATION);
  in = global(env.today);
  in.barcode = "NOPE";
  EXPECT_EQ(code_of([&] { mon().submit_finding(in, admin); }), ErrorCode::UNKNOWN_ITEM);
  in = global(env.today);
  in.object_name = "";
  EXPECT_EQ(code_of([&] { mon().submit_finding(in, admin); }), ErrorCode::INVALID_ARGUMENT);
  EXPECT_EQ(code_of([&] { (void)mon().get_record("fnd_missing"); }), ErrorCode::UNKNOWN_RECORD);
}

TEST_F(MonitoringTest, RolesOnTheWorkflow) {
  auto unit = make_user("unit1", Role::WORK_UNIT);
  auto lead = make_user("lead1", Role::LEADERSHIP);
  auto rec = mon().submit_finding(global(env.today), unit);
  EXPECT_EQ(rec.reporter, unit.user_id);
  EXPECT_EQ(code_of([&] { mon().submit_finding(global(env.today), lead); }), ErrorCode::FORBIDDEN);
  EXPECT_EQ(code_of([&] { mon().follow_up(rec.id, "x", unit); }), ErrorCode::FORBIDDEN);
  EXPECT_EQ(code_of([&] { mon().follow_up(rec.id, "x", lead); }), ErrorCode::FORBIDDEN);
  EXPECT_EQ(code_of([&] { mon().resolve(rec.id, env.today, unit); }), ErrorCode::FORBIDDEN);
  EXPECT_EQ(code_of([&] { mon().resolve(rec.id, env.today, lead); }), ErrorCode::FORBIDDEN);
  EXPECT_EQ(mon().get_record(rec.id).status, FindingStatus::OPEN);
}

TEST_F(MonitoringTest, PhotosAttachToRecords) {
  auto rec = mon().submit_finding(global(env.today), admin);
  PhotoUpload p{PhotoView::SIDE, std::string("\xFF\xD8\xFF\xE0jpegdata", 12), "image/jpeg"};
  auto ref = mon().attach_photo(rec.id, p, admin);
  EXPECT_EQ(mon().get_record(rec.id).photos.at(PhotoView::SIDE), ref);
  EXPECT_EQ(code_of([&] { mon().attach_photo(rec.id, PhotoUpload{PhotoView::SIDE, "", "image/jpeg"}, admin); }),
            ErrorCode::EMPTY_PAYLOAD);
  EXPECT_EQ(code_of([&] { mon().attach_photo(rec.id, PhotoUpload{PhotoView::SIDE, "GIF89a", "image/gif"}, admin); }),
            ErrorCode::UNSUPPORTED_MEDIA_TYPE);
}

TEST_F(MonitoringTest, FiltersMatchAScanOfTheModel) {
  auto w = build_world(env.s(), 40, 120, 77);
  std::map<std::string, Condition> condition_of;
  for (const auto& i : w.items) condition_of[i.barcode] = i.condition;

  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    RecordFilter f;
    if (rng() % 3 == 0) f.status = static_cast<FindingStatus>(rng() % 3);
    if (rng() % 3 == 0) f.campus_code = rng() % 2 ? "a" : "B";
    if (rng() % 4 == 0) f.location_code = world_rooms()[rng() % 4].second;
    if (rng() % 4 == 0) f.condition_of_item = kAllConditions[rng() % kAllConditions.size()];
    if (rng() % 3 == 0) f.item_linked = rng() % 2 == 0;
    if (rng() % 4 == 0) f.reporter = w.unit.user_id;
    if (rng() % 3 == 0) {
      Date a = Date(2026, 1, 1).plus_days(static_cast<int>(rng() % 181));
      Date b = a.plus_days(static_cast<int>(rng() % 60));
      f.period = std::make_pair(a, b);
    }
    if (rng() % 4 == 0) f.scope = RecordScope{w.unit.user_id, {w.location_id.at("A.101")}};

    std::vector<const ModelFinding*> expected;
    for (const auto& m : w.findings) {
      if (f.status && m.status != *f.status) continue;
      if (f.campus_code && (*f.campus_code == "a" ? "A" : *f.campus_code) != m.campus) continue;
      if (f.location_code && *f.location_code != m.location) continue;
      if (f.condition_of_item && (!m.barcode || condition_of.at(*m.barcode) != *f.condition_of_item)) continue;
      if (f.item_linked && m.barcode.has_value() != *f.item_linked) continue;
      if (f.reporter && m.reporter_id != *f.reporter) continue;
      if (f.period && (m.date < f.period->first || f.period->second < m.date)) continue;
      if (f.scope && m.reporter_id != w.unit.user_id && m.location != "A.101") continue;
      expected.push_back(&m);
    }
    std::sort(expected.begin(), expected.end(), [](auto* a, auto* b) {
      return a->date != b->date ? b->date < a->date : a->id < b->id;
    });
    auto got = mon().list_records(f);
    ASSERT_EQ(got.size(), expected.size()) << "trial " << trial;
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].id, expected[i]->id);
  }
}

TEST_F(MonitoringTest, StatusCountsSumToTotal) {
  auto w = build_world(env.s(), 10, 50, 3);
  std::size_t sum = 0;
  for (auto st : {FindingStatus::OPEN, FindingStatus::FOLLOW_UP, FindingStatus::RESOLVED}) {
    RecordFilter f;
    f.status = st;
    sum += mon().list_records(f).size();
  }
  EXPECT_EQ(sum, w.findings.size());
  EXPECT_EQ(mon().list_records().size(), w.findings.size());
  RecordFilter bad;
  bad.period = std::make_pair(Date(2026, 2, 1), Date(2026, 1, 1));
  EXPECT_EQ(code_of([&] { (void)mon().list_records(bad); }), ErrorCode::INVALID_PERIOD);
}
