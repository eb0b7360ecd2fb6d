#include "http_client.hpp"

#include <httplib.h>

#include "cha/error.hpp"

namespace cha::http {

namespace {

httplib::Headers to_headers(const Headers& headers) {
  httplib::Headers out;
  for (const auto& [k, v] : headers) out.emplace(k, v);
  return out;
}

Response convert(const httplib::Result& res, const std::string& target) {
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      throw Error(Errc::Timeout, target + ": " + httplib::to_string(err));
    }
    throw Error(Errc::ClientError, target + ": " + httplib::to_string(err));
  }
  return Response{res->status, res->body, res->get_header_value("Content-Type")};
}

}  // namespace

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

Response post(const std::string& base_url, const std::string& path, const Headers& headers,
              const std::string& body, const std::string& content_type,
              std::chrono::seconds timeout) {
  httplib::Client client(base_url);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return convert(client.Post(path, to_headers(headers), body, content_type), base_url + path);
}

Response get(const std::string& url, const Headers& headers, std::chrono::seconds timeout) {
  const auto [base, path] = split_url(url);
  httplib::Client client(base);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_follow_location(true);
  return convert(client.Get(path, to_headers(headers)), url);
}

}  // namespace cha::http
