#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bayesgate/json_io.hpp"

namespace bayesgate {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything the serve command needs. Filter and policy sections are the
// boot values; admin config updates override them at runtime through the
// store.
struct AppConfig {
  FilterConfig filter;
  PolicyConfig policy;
  std::string storage_path = "./bayesgate-data";
  std::string listen_address = "127.0.0.1:8080";
  std::string admin_token;             // empty disables the admin routes
  std::string trusted_forward_header;  // e.g. "X-Forwarded-For"; empty = socket peer
};

inline std::optional<std::string> validate(const FilterConfig& c) {
  if (!(c.threshold > 0.0 && c.threshold < 1.0))
    return "threshold must lie in (0, 1)";
  if (!(c.autolearn_threshold > 0.0 && c.autolearn_threshold <= 1.0))
    return "autolearn_threshold must lie in (0, 1]";
  if (c.autolearn_threshold < c.threshold)
    return "autolearn_threshold must be >= threshold";
  return std::nullopt;
}

inline std::optional<std::string> validate(const PolicyConfig& c) {
  if (c.min_interval_seconds <= 0) return "min_interval_seconds must be positive";
  if (c.block_after_spam_count <= 0) return "block_after_spam_count must be positive";
  if (c.spam_window_hours <= 0) return "spam_window_hours must be positive";
  if (c.block_duration_hours <= 0) return "block_duration_hours must be positive";
  return std::nullopt;
}

inline void to_json(nlohmann::json& j, const AppConfig& c) {
  j = {{"filter", c.filter},
       {"policy", c.policy},
       {"storage_path", c.storage_path},
       {"listen_address", c.listen_address},
       {"admin_token", c.admin_token},
       {"trusted_forward_header", c.trusted_forward_header}};
}

inline void from_json(const nlohmann::json& j, AppConfig& c) {
  if (j.contains("filter")) j.at("filter").get_to(c.filter);
  if (j.contains("policy")) j.at("policy").get_to(c.policy);
  c.storage_path = j.value("storage_path", c.storage_path);
  c.listen_address = j.value("listen_address", c.listen_address);
  c.admin_token = j.value("admin_token", c.admin_token);
  c.trusted_forward_header =
      j.value("trusted_forward_header", c.trusted_forward_header);
}

// "host:port" -> pair; the last colon splits, so bracketless v6 literals
// still parse.
inline std::pair<std::string, int> split_listen_address(const std::string& addr) {
  const auto pos = addr.rfind(':');
  if (pos == std::string::npos || pos + 1 >= addr.size())
    throw ConfigError("listen_address must look like host:port: " + addr);
  const std::string host = addr.substr(0, pos);
  int port = 0;
  try {
    port = std::stoi(addr.substr(pos + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad port in listen_address: " + addr);
  }
  if (host.empty() || port <= 0 || port > 65535)
    throw ConfigError("bad listen_address: " + addr);
  return {host, port};
}

inline AppConfig parse_app_config(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("config is not a JSON object");
  AppConfig cfg;
  try {
    from_json(j, cfg);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  if (auto err = validate(cfg.filter)) throw ConfigError(*err);
  if (auto err = validate(cfg.policy)) throw ConfigError(*err);
  if (cfg.storage_path.empty()) throw ConfigError("storage_path must be set");
  split_listen_address(cfg.listen_address);  // throws on a bad address
  return cfg;
}

inline AppConfig load_app_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_app_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace bayesgate
