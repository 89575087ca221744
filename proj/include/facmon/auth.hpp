#pragma once

// Accounts, password verification, sessions, and the role permission matrix.

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "facmon/domain.hpp"
#include "facmon/storage.hpp"

namespace facmon {

enum class Permission {
  ReferenceRead,
  ReferenceWrite,
  ItemRegister,
  ItemRead,
  ItemTransfer,
  ItemStatus,
  ItemRepair,
  PhotoUpload,
  FindingSubmit,
  FindingRead,
  FindingReadOwn,
  FindingFollowUp,
  FindingResolve,
  ReportRead,
  UserManage,
  AuditRead,
};

inline constexpr std::array kAllPermissions = {
    Permission::ReferenceRead,  Permission::ReferenceWrite,  Permission::ItemRegister,
    Permission::ItemRead,       Permission::ItemTransfer,    Permission::ItemStatus,
    Permission::ItemRepair,     Permission::PhotoUpload,     Permission::FindingSubmit,
    Permission::FindingRead,    Permission::FindingReadOwn,  Permission::FindingFollowUp,
    Permission::FindingResolve, Permission::ReportRead,      Permission::UserManage,
    Permission::AuditRead,
};

/// Dotted key, e.g. `item.register`; these are also the audit action names.
std::string_view permission_key(Permission p) noexcept;
std::optional<Permission> parse_permission(std::string_view key) noexcept;

/// Total over (role, permission).
/// FACILITIES_ADMIN: everything. WORK_UNIT: finding.submit, finding.read.own,
/// item.read (own locations), photo.upload. LEADERSHIP: report.read, item.read,
/// finding.read.
constexpr bool permits(Role role, Permission p) noexcept {
  switch (role) {
    case Role::FACILITIES_ADMIN:
      return true;
    case Role::WORK_UNIT:
      return p == Permission::FindingSubmit || p == Permission::FindingReadOwn ||
             p == Permission::ItemRead || p == Permission::PhotoUpload;
    case Role::LEADERSHIP:
      return p == Permission::ReportRead || p == Permission::ItemRead ||
             p == Permission::FindingRead;
  }
  return false;
}

struct User {
  std::string id;
  std::string username;
  std::string password_digest;
  Role role = Role::FACILITIES_ADMIN;
  std::optional<std::string> work_unit_name;
  std::vector<std::string> assigned_locations;
  bool active = true;

  bool operator==(const User&) const = default;
};

struct NewUser {
  std::string username;
  std::string password;
  Role role = Role::FACILITIES_ADMIN;
  std::optional<std::string> work_unit_name;
  std::vector<LocationAddress> locations;
};

struct SessionGrant {
  std::string token;
  User user;
  Timestamp issued_at;
  Timestamp expires_at;
};

struct AuthOptions {
  std::chrono::hours session_ttl{8};
  // Argon2id cost; defaults match libsodium's interactive profile.
  unsigned long long pwhash_ops_limit = 2;
  std::size_t pwhash_mem_limit = 64u * 1024u * 1024u;
};

/// Cheapest parameters libsodium accepts; for tests.
AuthOptions fast_auth_options();

class Auth {
 public:
  Auth(Store& store, AuthOptions options = {});

  /// Errors: INVALID_USERNAME, DUPLICATE_USERNAME, WEAK_PASSWORD, MISSING_WORK_UNIT,
  /// INVALID_ARGUMENT, UNKNOWN_LOCATION.
  User add_user(const NewUser& input, const Actor& actor);
  /// Errors: UNKNOWN_USER.
  User deactivate_user(std::string_view username, const Actor& actor);
  [[nodiscard]] std::vector<User> list_users() const;
  [[nodiscard]] std::optional<User> find_user(std::string_view username) const;
  [[nodiscard]] std::optional<User> find_user_by_id(std::string_view id) const;

  /// Errors: INVALID_CREDENTIALS (unknown user and wrong password alike), ACCOUNT_INACTIVE.
  SessionGrant authenticate(std::string_view username, std::string_view password);

  /// Live session lookup plus the permission matrix.
  /// Errors: UNAUTHENTICATED, FORBIDDEN.
  Actor authorize(std::string_view token, Permission permission) const;
  /// Errors: UNAUTHENTICATED.
  Actor resolve_session(std::string_view token) const;

  [[nodiscard]] const AuthOptions& options() const noexcept { return options_; }

 private:
  std::string hash_password(std::string_view password) const;
  bool verify_password(const std::string& digest, std::string_view password) const;

  Store& store_;
  AuthOptions options_;
  std::string decoy_digest_;
};

Actor to_actor(const User& user);

/// Public shape: never includes the password digest.
void to_json(nlohmann::json& j, const User& v);
nlohmann::json user_document(const User& v);
User user_from_document(const nlohmann::json& j);

}  // namespace facmon
