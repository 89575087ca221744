#include "facmon/auth.hpp"

#include <sodium.h>

#include <algorithm>

#include "facmon/catalog.hpp"
#include "facmon/codec.hpp"
#include "facmon/crypto.hpp"
#include "facmon/error.hpp"

namespace facmon {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 16> kPermissionKeys = {
    "reference.read", "reference.write",   "item.register",   "item.read",
    "item.transfer",  "item.status",       "item.repair",     "photo.upload",
    "finding.submit", "finding.read",      "finding.read.own", "finding.follow_up",
    "finding.resolve", "report.read",      "user.manage",     "audit.read",
};
static_assert(kPermissionKeys.size() == kAllPermissions.size());

constexpr std::size_t kMinPassword = 8;

bool valid_username(std::string_view u) {
  if (u.size() < 3 || u.size() > 32) return false;
  return std::all_of(u.begin(), u.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

std::string token_key(std::string_view token) { return crypto::sha256_hex(token); }

}  // namespace

std::string_view permission_key(Permission p) noexcept {
  return kPermissionKeys[static_cast<std::size_t>(p)];
}

std::optional<Permission> parse_permission(std::string_view key) noexcept {
  for (std::size_t i = 0; i < kPermissionKeys.size(); ++i) {
    if (kPermissionKeys[i] == key) return static_cast<Permission>(i);
  }
  return std::nullopt;
}

AuthOptions fast_auth_options() {
  AuthOptions o;
  o.pwhash_ops_limit = crypto_pwhash_OPSLIMIT_MIN;
  o.pwhash_mem_limit = crypto_pwhash_MEMLIMIT_MIN;
  return o;
}

Auth::Auth(Store& store, AuthOptions options) : store_(store), options_(options) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  if (options_.pwhash_ops_limit < crypto_pwhash_OPSLIMIT_MIN ||
      options_.pwhash_mem_limit < crypto_pwhash_MEMLIMIT_MIN) {
    fail(ErrorCode::CONFIG_ERROR, "password hashing limits below the algorithm minimum");
  }
  decoy_digest_ = hash_password(crypto::random_hex(16));
}

std::string Auth::hash_password(std::string_view password) const {
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str_alg(out, password.data(), password.size(), options_.pwhash_ops_limit,
                            options_.pwhash_mem_limit, crypto_pwhash_ALG_ARGON2ID13) != 0) {
    fail(ErrorCode::INTERNAL, "password hashing ran out of memory");
  }
  return out;
}

bool Auth::verify_password(const std::string& digest, std::string_view password) const {
  return crypto_pwhash_str_verify(digest.c_str(), password.data(), password.size()) == 0;
}

User Auth::add_user(const NewUser& in, const Actor& actor) {
  if (!valid_username(in.username)) {
    fail(ErrorCode::INVALID_USERNAME,
         "usernames are 3-32 characters of lowercase letters, digits and underscore");
  }
  Catalog catalog(store_.snapshot());
  if (catalog.state().find(kind::kUser, in.username)) {
    fail(ErrorCode::DUPLICATE_USERNAME, "username " + in.username + " is taken");
  }
  if (in.password.size() < kMinPassword) {
    fail(ErrorCode::WEAK_PASSWORD, "passwords need at least 8 characters");
  }
  std::optional<std::string> unit;
  if (in.work_unit_name && !trim(*in.work_unit_name).empty()) unit = trim(*in.work_unit_name);
  if (in.role == Role::WORK_UNIT && !unit) {
    fail(ErrorCode::MISSING_WORK_UNIT, "work unit accounts need a work unit name");
  }
  if (in.role != Role::WORK_UNIT && unit) {
    fail(ErrorCode::INVALID_ARGUMENT, "only work unit accounts carry a work unit name");
  }
  User user;
  for (const auto& addr : in.locations) {
    auto loc = catalog.location(addr);
    if (!loc) {
      fail(ErrorCode::UNKNOWN_LOCATION,
           "location " + addr.campus_code + "/" + addr.location_code + " does not exist");
    }
    user.assigned_locations.push_back(loc->id);
  }
  std::sort(user.assigned_locations.begin(), user.assigned_locations.end());
  user.assigned_locations.erase(
      std::unique(user.assigned_locations.begin(), user.assigned_locations.end()),
      user.assigned_locations.end());
  user.id = make_id("usr");
  user.username = in.username;
  user.password_digest = hash_password(in.password);
  user.role = in.role;
  user.work_unit_name = unit;
  user.active = true;

  Changeset cs;
  cs.actor = actor.user_id;
  cs.action = "user.manage";
  cs.put(std::string(kind::kUser), user.username, 0, user_document(user));
  store_.commit(cs);
  return user;
}

User Auth::deactivate_user(std::string_view username, const Actor& actor) {
  Catalog catalog(store_.snapshot());
  const auto* doc = catalog.state().find(kind::kUser, username);
  if (!doc) fail(ErrorCode::UNKNOWN_USER, "no user " + std::string(username));
  auto user = user_from_document(*doc);
  user.active = false;
  Changeset cs;
  cs.actor = actor.user_id;
  cs.action = "user.manage";
  cs.put(std::string(kind::kUser), user.username, catalog.version(kind::kUser, username),
         user_document(user));
  store_.commit(cs);
  return user;
}

std::vector<User> Auth::list_users() const {
  auto snap = store_.snapshot();
  std::vector<User> out;
  for (const auto& [key, vd] : snap->kind(kind::kUser)) out.push_back(user_from_document(*vd.doc));
  return out;
}

std::optional<User> Auth::find_user(std::string_view username) const {
  auto snap = store_.snapshot();
  const auto* doc = snap->find(kind::kUser, username);
  if (!doc) return std::nullopt;
  return user_from_document(*doc);
}

std::optional<User> Auth::find_user_by_id(std::string_view id) const {
  auto snap = store_.snapshot();
  for (const auto& [key, vd] : snap->kind(kind::kUser)) {
    if (vd.doc->value("id", std::string{}) == id) return user_from_document(*vd.doc);
  }
  return std::nullopt;
}

SessionGrant Auth::authenticate(std::string_view username, std::string_view password) {
  auto user = find_user(username);
  // Verify against a decoy for unknown users so both failures cost the same.
  bool ok = verify_password(user ? user->password_digest : decoy_digest_, password);
  if (!user || !ok) fail(ErrorCode::INVALID_CREDENTIALS, "invalid username or password");
  if (!user->active) fail(ErrorCode::ACCOUNT_INACTIVE, "account is deactivated");

  SessionGrant grant;
  grant.token = crypto::random_hex(32);
  grant.user = *user;
  grant.issued_at = store_.now();
  grant.expires_at = grant.issued_at + std::chrono::duration_cast<std::chrono::milliseconds>(
                                           options_.session_ttl);
  auto key = token_key(grant.token);
  Changeset cs;
  cs.actor = user->id;
  cs.action = "session.create";
  cs.entity_kind = kind::kSession;
  cs.entity_id = user->username;
  cs.put(std::string(kind::kSession), key, 0,
         json{{"user_id", user->id},
              {"username", user->username},
              {"issued_at", format_timestamp(grant.issued_at)},
              {"expires_at", format_timestamp(grant.expires_at)}});
  store_.commit(cs);
  return grant;
}

Actor Auth::resolve_session(std::string_view token) const {
  if (token.empty()) fail(ErrorCode::UNAUTHENTICATED, "missing bearer token");
  auto snap = store_.snapshot();
  const auto* session = snap->find(kind::kSession, token_key(token));
  if (!session) fail(ErrorCode::UNAUTHENTICATED, "unknown or expired session");
  auto expires = parse_timestamp(session->at("expires_at").get<std::string>());
  if (!expires || store_.now() >= *expires) {
    fail(ErrorCode::UNAUTHENTICATED, "unknown or expired session");
  }
  const auto* user_doc = snap->find(kind::kUser, session->at("username").get<std::string>());
  if (!user_doc) fail(ErrorCode::UNAUTHENTICATED, "unknown or expired session");
  auto user = user_from_document(*user_doc);
  if (!user.active || user.id != session->at("user_id").get<std::string>()) {
    fail(ErrorCode::UNAUTHENTICATED, "account is no longer active");
  }
  return to_actor(user);
}

Actor Auth::authorize(std::string_view token, Permission permission) const {
  auto actor = resolve_session(token);
  if (!permits(actor.role, permission)) {
    fail(ErrorCode::FORBIDDEN, std::string(to_string(actor.role)) + " lacks permission " +
                                   std::string(permission_key(permission)));
  }
  return actor;
}

Actor to_actor(const User& user) {
  return Actor{user.id, user.username, user.role, user.assigned_locations};
}

void to_json(json& j, const User& v) {
  j = json{{"id", v.id},
           {"username", v.username},
           {"role", v.role},
           {"work_unit_name", optional_json(v.work_unit_name)},
           {"assigned_locations", v.assigned_locations},
           {"active", v.active}};
}

json user_document(const User& v) {
  json j = v;
  j["password_digest"] = v.password_digest;
  return j;
}

User user_from_document(const json& j) {
  User v;
  v.id = j.at("id").get<std::string>();
  v.username = j.at("username").get<std::string>();
  v.password_digest = j.at("password_digest").get<std::string>();
  v.role = j.at("role").get<Role>();
  v.work_unit_name = optional_from<std::string>(j, "work_unit_name");
  v.assigned_locations = j.at("assigned_locations").get<std::vector<std::string>>();
  v.active = j.at("active").get<bool>();
  return v;
}

}  // namespace facmon
