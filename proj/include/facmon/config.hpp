#pragma once

// Service configuration: a JSON file, then environment overrides, then flags.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace facmon {

struct BindAddress {
  std::string host;
  int port = 0;
};

struct Config {
  std::string bind_addr = "127.0.0.1:8080";
  std::filesystem::path data_dir = "data";
  int session_ttl_hours = 8;
  std::size_t max_upload_bytes = 5u * 1024u * 1024u;
  std::optional<std::string> tls_cert;
  std::optional<std::string> tls_key;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads process environment variables.
std::optional<std::string> process_env(const std::string& name);

/// Errors: CONFIG_ERROR (unreadable file, bad JSON, unknown key, wrong type).
Config load_config_file(const std::filesystem::path& path);

/// BIND_ADDR, DATA_DIR, SESSION_TTL_HOURS, MAX_UPLOAD_BYTES. Errors: CONFIG_ERROR.
void apply_env(Config& config, const EnvLookup& env);

/// Errors: CONFIG_ERROR. IPv4 or hostname, port 0..65535.
BindAddress parse_bind_addr(const std::string& text);

/// Checks every field. TLS is not supported, so any TLS setting is rejected.
/// Errors: CONFIG_ERROR.
void validate(const Config& config);

}  // namespace facmon
