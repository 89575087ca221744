#include "facmon/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "facmon/error.hpp"

namespace facmon {

using nlohmann::json;

namespace {

long long parse_integer(const std::string& name, const std::string& text) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorCode::CONFIG_ERROR, name + " is not an integer: '" + text + "'");
  }
  return v;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

Config load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::CONFIG_ERROR, "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::CONFIG_ERROR, "config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) fail(ErrorCode::CONFIG_ERROR, "config file must hold a JSON object");

  Config c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "bind_addr") {
        c.bind_addr = value.get<std::string>();
      } else if (key == "data_dir") {
        c.data_dir = value.get<std::string>();
      } else if (key == "session_ttl_hours") {
        c.session_ttl_hours = value.get<int>();
      } else if (key == "max_upload_bytes") {
        if (!value.is_number_unsigned()) {
          fail(ErrorCode::CONFIG_ERROR, "max_upload_bytes must be a positive integer");
        }
        c.max_upload_bytes = value.get<std::size_t>();
      } else if (key == "tls") {
        if (!value.is_object()) fail(ErrorCode::CONFIG_ERROR, "tls must be an object");
        if (value.contains("cert")) c.tls_cert = value.at("cert").get<std::string>();
        if (value.contains("key")) c.tls_key = value.at("key").get<std::string>();
      } else {
        fail(ErrorCode::CONFIG_ERROR, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::CONFIG_ERROR, "config value has the wrong type: " + std::string(e.what()));
  }
  return c;
}

void apply_env(Config& config, const EnvLookup& env) {
  if (auto v = env("BIND_ADDR")) config.bind_addr = *v;
  if (auto v = env("DATA_DIR")) config.data_dir = *v;
  if (auto v = env("SESSION_TTL_HOURS")) {
    config.session_ttl_hours = static_cast<int>(parse_integer("SESSION_TTL_HOURS", *v));
  }
  if (auto v = env("MAX_UPLOAD_BYTES")) {
    auto n = parse_integer("MAX_UPLOAD_BYTES", *v);
    if (n <= 0) fail(ErrorCode::CONFIG_ERROR, "MAX_UPLOAD_BYTES must be positive");
    config.max_upload_bytes = static_cast<std::size_t>(n);
  }
}

BindAddress parse_bind_addr(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    fail(ErrorCode::CONFIG_ERROR, "bind address must be host:port, got '" + text + "'");
  }
  BindAddress b;
  b.host = text.substr(0, colon);
  for (char ch : b.host) {
    bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-';
    if (!ok) fail(ErrorCode::CONFIG_ERROR, "invalid host in bind address '" + text + "'");
  }
  auto port = parse_integer("port", text.substr(colon + 1));
  if (port < 0 || port > 65535) fail(ErrorCode::CONFIG_ERROR, "port out of range in '" + text + "'");
  b.port = static_cast<int>(port);
  return b;
}

void validate(const Config& config) {
  parse_bind_addr(config.bind_addr);
  if (config.data_dir.empty()) fail(ErrorCode::CONFIG_ERROR, "data_dir is empty");
  if (config.session_ttl_hours <= 0) {
    fail(ErrorCode::CONFIG_ERROR, "session_ttl_hours must be positive");
  }
  if (config.max_upload_bytes == 0) fail(ErrorCode::CONFIG_ERROR, "max_upload_bytes must be positive");
  if (config.tls_cert || config.tls_key) {
    fail(ErrorCode::CONFIG_ERROR, "TLS is not supported; terminate TLS in a reverse proxy");
  }
}

}  // namespace facmon
