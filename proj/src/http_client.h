#pragma once

#include <chrono>
#include <map>
#include <string>

namespace ontorag::detail {

struct HttpResult {
  int status = 0;
  std::string body;
};

// POSTs a JSON body to an absolute http(s) URL. Throws TimeoutError when the
// connection or read times out and Error for other transport failures; HTTP
// error statuses are returned, not thrown.
HttpResult post_json(const std::string& url, const std::string& body,
                     const std::map<std::string, std::string>& headers, std::chrono::milliseconds timeout);

// Requests attempted by post_json in this process.
std::size_t request_count();

// Joins a base URL and a path without doubling the slash.
std::string join_url(const std::string& base, const std::string& path);

}  // namespace ontorag::detail
