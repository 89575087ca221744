#pragma once

// HTTP/1.1 JSON surface over the domain services.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/logger.h>

#include "facmon/auth.hpp"
#include "facmon/error.hpp"
#include "facmon/services.hpp"

namespace facmon {

/// Deterministic, total mapping of domain errors to HTTP status codes.
int http_status(ErrorCode code) noexcept;

struct RouteInfo {
  std::string method;
  std::string pattern;  // httplib syntax, `:name` marks a path parameter
  /// Unset only for the unauthenticated routes (login, health).
  std::optional<Permission> permission;
  /// Narrower permission that also grants access, with results scoped to the caller.
  std::optional<Permission> scoped_permission;

  [[nodiscard]] bool authenticated() const noexcept { return permission.has_value(); }
  [[nodiscard]] bool allows(Role role) const noexcept {
    if (!permission) return true;
    return permits(role, *permission) || (scoped_permission && permits(role, *scoped_permission));
  }
};

/// Every bound endpoint.
const std::vector<RouteInfo>& route_table();

inline constexpr int kDefaultPageLimit = 100;
inline constexpr int kMaxPageLimit = 1000;

struct ApiOptions {
  std::size_t max_upload_bytes = 5u * 1024u * 1024u;
  std::shared_ptr<spdlog::logger> access_log;  // null: spdlog default logger
};

class ApiServer {
 public:
  ApiServer(Services& services, ApiOptions options = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the bound port.
  /// Errors: BIND_FAILURE.
  int bind(const std::string& host, int port);
  /// Serves until stop(); requires bind().
  void serve();
  /// serve() on a background thread; returns once the server accepts connections.
  void start();
  /// Stops accepting, lets in-flight requests finish, joins the background thread.
  void stop();

  [[nodiscard]] int port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace facmon
