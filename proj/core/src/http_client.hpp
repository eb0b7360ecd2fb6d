#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace cha::http {

struct Response {
  int status = 0;
  std::string body;
  std::string content_type;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

// Splits "scheme://host[:port]/path?q" into ("scheme://host[:port]", "/path?q").
std::pair<std::string, std::string> split_url(const std::string& url);

// Transport failures throw Error(Timeout) or Error(ClientError); any HTTP
// status is returned to the caller.
Response post(const std::string& base_url, const std::string& path, const Headers& headers,
              const std::string& body, const std::string& content_type,
              std::chrono::seconds timeout);

Response get(const std::string& url, const Headers& headers, std::chrono::seconds timeout);

}  // namespace cha::http
