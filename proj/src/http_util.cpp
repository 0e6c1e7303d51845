#include "http_util.hpp"

#include <cstdlib>

#include "xfid/error.hpp"

namespace xfid::detail {

UrlParts split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::ConfigError, "URL without scheme: " + std::string(url));
  }
  const std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::ConfigError, "unsupported URL scheme: " + std::string(url));
  }
  const auto host_begin = scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  UrlParts parts;
  parts.origin = std::string(url.substr(0, path_begin));
  parts.path = path_begin == std::string_view::npos ? "/" : std::string(url.substr(path_begin));
  if (parts.origin.size() <= host_begin) {
    throw Error(ErrorCode::ConfigError, "URL without host: " + std::string(url));
  }
  return parts;
}

std::string read_token(const std::string& env_name) {
  if (env_name.empty()) return {};
  const char* value = std::getenv(env_name.c_str());
  return value ? std::string(value) : std::string();
}

}  // namespace xfid::detail
