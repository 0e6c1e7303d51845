#pragma once

#include <string>
#include <string_view>

namespace xfid::detail {

/// "https://host:8443/v1/embed" -> {"https://host:8443", "/v1/embed"}.
struct UrlParts {
  std::string origin;
  std::string path;
};

/// Throws Error(ConfigError) when the URL has no http(s) scheme or host.
UrlParts split_url(std::string_view url);

/// Value of the named environment variable, or "" when unset or unnamed.
std::string read_token(const std::string& env_name);

/// 429, 5xx and transport-level failures (status 0) are worth retrying.
inline bool is_transient_status(int status) {
  return status == 0 || status == 408 || status == 429 || (status >= 500 && status <= 599);
}

}  // namespace xfid::detail
