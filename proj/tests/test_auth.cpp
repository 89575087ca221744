#include <gtest/gtest.h>

#include <fstream>
#include <iterator>

#include "facmon/auth.hpp"
#include "support.hpp"

using namespace facmon;
using namespace facmon::testing;

namespace {

using P = Permission;

// Literal copy of the role matrix: the permissions each role holds.
const std::map<Role, std::set<Permission>>& expected_grants() {
  static const std::map<Role, std::set<Permission>> grants = {
      {Role::FACILITIES_ADMIN,
       {P::ReferenceRead, P::ReferenceWrite, P::ItemRegister, P::ItemRead, P::ItemTransfer,
        P::ItemStatus, P::ItemRepair, P::PhotoUpload, P::FindingSubmit, P::FindingRead,
        P::FindingReadOwn, P::FindingFollowUp, P::FindingResolve, P::ReportRead, P::UserManage,
        P::AuditRead}},
      {Role::WORK_UNIT, {P::FindingSubmit, P::FindingReadOwn, P::ItemRead, P::PhotoUpload}},
      {Role::LEADERSHIP, {P::ReportRead, P::ItemRead, P::FindingRead}},
  };
  return grants;
}

struct AuthTest : ::testing::Test {
  Env env;
  Actor admin = Actor::system();
  void SetUp() override { seed_reference(env.s()); }
  Auth& auth() { return env.s().auth; }

  User add(const std::string& name, Role role, const std::string& password = "correct-horse-1") {
    NewUser nu;
    nu.username = name;
    nu.password = password;
    nu.role = role;
    if (role == Role::WORK_UNIT) {
      nu.work_unit_name = "Unit " + name;
      nu.locations = {{"A", "A.101"}};
    }
    return auth().add_user(nu, admin);
  }
};

}  // namespace

TEST(PermissionMatrix, MatchesLiteralTable) {
  for (auto role : kAllRoles) {
    for (auto p : kAllPermissions) {
      EXPECT_EQ(permits(role, p), expected_grants().at(role).count(p) == 1)
          << to_string(role) << " " << permission_key(p);
    }
  }
}

TEST(PermissionMatrix, KeysRoundTrip) {
  std::set<std::string_view> keys;
  for (auto p : kAllPermissions) {
    EXPECT_EQ(parse_permission(permission_key(p)), p);
    EXPECT_TRUE(keys.insert(permission_key(p)).second);
  }
  EXPECT_FALSE(parse_permission("nope"));
}

TEST_F(AuthTest, AuthorizeFollowsTheMatrixForLiveSessions) {
  add("admin1", Role::FACILITIES_ADMIN);
  add("unit1", Role::WORK_UNIT);
  add("lead1", Role::LEADERSHIP);
  for (const auto& [name, role] : {std::pair{"admin1", Role::FACILITIES_ADMIN},
                                   std::pair{"unit1", Role::WORK_UNIT},
                                   std::pair{"lead1", Role::LEADERSHIP}}) {
    auto grant = auth().authenticate(name, "correct-horse-1");
    EXPECT_EQ(grant.user.role, role);
    for (auto p : kAllPermissions) {
      if (expected_grants().at(role).count(p)) {
        EXPECT_EQ(auth().authorize(grant.token, p).username, name);
      } else {
        EXPECT_EQ(code_of([&] { (void)auth().authorize(grant.token, p); }), ErrorCode::FORBIDDEN);
      }
    }
  }
  EXPECT_EQ(code_of([&] { (void)auth().authorize("", P::ItemRead); }), ErrorCode::UNAUTHENTICATED);
  EXPECT_EQ(code_of([&] { (void)auth().authorize("bogus", P::ItemRead); }), ErrorCode::UNAUTHENTICATED);
}

TEST_F(AuthTest, AddUserValidation) {
  auto u = add("ok_user", Role::LEADERSHIP);
  EXPECT_TRUE(u.password_digest.rfind("$argon2id$", 0) == 0);
  EXPECT_EQ(code_of([&] { add("ok_user", Role::LEADERSHIP); }), ErrorCode::DUPLICATE_USERNAME);
  EXPECT_EQ(code_of([&] { add("No Caps", Role::LEADERSHIP); }), ErrorCode::INVALID_USERNAME);
  EXPECT_EQ(code_of([&] { add("ab", Role::LEADERSHIP); }), ErrorCode::INVALID_USERNAME);
  EXPECT_EQ(code_of([&] { add("shorty", Role::LEADERSHIP, "1234567"); }), ErrorCode::WEAK_PASSWORD);
  NewUser nu{"unit_x", "long-enough-1", Role::WORK_UNIT, std::nullopt, {}};
  EXPECT_EQ(code_of([&] { auth().add_user(nu, admin); }), ErrorCode::MISSING_WORK_UNIT);
  nu.work_unit_name = "Unit X";
  nu.locations = {{"A", "Z.1"}};
  EXPECT_EQ(code_of([&] { auth().add_user(nu, admin); }), ErrorCode::UNKNOWN_LOCATION);
  NewUser lead{"lead_x", "long-enough-1", Role::LEADERSHIP, std::string("Unit"), {}};
  EXPECT_EQ(code_of([&] { auth().add_user(lead, admin); }), ErrorCode::INVALID_ARGUMENT);
}

TEST_F(AuthTest, CredentialFailuresAreUniform) {
  add("alice", Role::FACILITIES_ADMIN);
  Error unknown(ErrorCode::INTERNAL, "");
  Error wrong(ErrorCode::INTERNAL, "");
  try { (void)auth().authenticate("nobody", "whatever-pass"); } catch (const Error& e) { unknown = e; }
  try { (void)auth().authenticate("alice", "wrong-password"); } catch (const Error& e) { wrong = e; }
  EXPECT_EQ(unknown.code(), ErrorCode::INVALID_CREDENTIALS);
  EXPECT_EQ(wrong.code(), ErrorCode::INVALID_CREDENTIALS);
  EXPECT_STREQ(unknown.what(), wrong.what());
}

TEST_F(AuthTest, DeactivationBlocksLoginAndLiveSessions) {
  add("bob", Role::LEADERSHIP);
  auto grant = auth().authenticate("bob", "correct-horse-1");
  auth().deactivate_user("bob", admin);
  EXPECT_EQ(code_of([&] { (void)auth().authenticate("bob", "correct-horse-1"); }),
            ErrorCode::ACCOUNT_INACTIVE);
  EXPECT_EQ(code_of([&] { (void)auth().resolve_session(grant.token); }), ErrorCode::UNAUTHENTICATED);
  EXPECT_EQ(code_of([&] { auth().deactivate_user("ghost", admin); }), ErrorCode::UNKNOWN_USER);
}

TEST(AuthSession, ExpiresAfterTtl) {
  auto now = std::make_shared<Timestamp>(noon(Date(2026, 6, 15)));
  StoreOptions options;
  options.sync = false;
  options.clock = [now] { return *now; };
  Env env(Date(2026, 6, 15), options, false);
  NewUser nu{"carol", "long-enough-1", Role::LEADERSHIP, std::nullopt, {}};
  env.s().auth.add_user(nu, Actor::system());
  auto grant = env.s().auth.authenticate("carol", "long-enough-1");
  EXPECT_EQ(grant.expires_at - grant.issued_at, std::chrono::hours(8));
  *now += std::chrono::hours(8) - std::chrono::milliseconds(1);
  EXPECT_EQ(env.s().auth.resolve_session(grant.token).username, "carol");
  *now += std::chrono::milliseconds(1);
  EXPECT_EQ(code_of([&] { (void)env.s().auth.resolve_session(grant.token); }), ErrorCode::UNAUTHENTICATED);
}

TEST_F(AuthTest, PlaintextPasswordsNeverReachTheDisk) {
  const std::string secret = "plaintext-needle-7731";
  add("dave", Role::FACILITIES_ADMIN, secret);
  auto grant = auth().authenticate("dave", secret);
  nlohmann::json pub = *auth().find_user("dave");
  EXPECT_FALSE(pub.contains("password_digest"));
  EXPECT_EQ(pub.dump().find(secret), std::string::npos);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(env.dir.path())) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::string body((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(body.find(secret), std::string::npos) << entry.path();
    EXPECT_EQ(body.find(grant.token), std::string::npos) << entry.path();
  }
}
