#pragma once

#include <string>
#include <string_view>

#include "httplib.h"

namespace logkg::detail {

struct HttpTarget {
  std::string origin;  // scheme://host[:port]
  std::string base_path;
};

/// Splits "http://host:8080/prefix" into origin and path prefix.
inline HttpTarget split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string_view::npos) return {std::string(url), ""};
  std::string path(url.substr(path_start));
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {std::string(url.substr(0, path_start)), path};
}

}  // namespace logkg::detail
