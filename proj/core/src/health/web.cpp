#include "cha/health/web.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "../http_client.hpp"
#include "cha/error.hpp"
#include "cha/log.hpp"
#include "cha/text.hpp"

namespace cha::health {

namespace {

std::string normalize_query(std::string_view q) { return to_lower(collapse_whitespace(q)); }

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

bool iequals_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) return false;
  }
  return true;
}

std::size_t ifind(std::string_view text, std::string_view word, std::size_t from) {
  for (std::size_t i = from; i + word.size() <= text.size(); ++i) {
    if (iequals_at(text, i, word)) return i;
  }
  return std::string_view::npos;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x110000) {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string decode_entities(std::string_view s) {
  static const std::map<std::string_view, std::string_view> kNamed = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"},
      {"nbsp", " "}, {"ndash", "-"}, {"mdash", "-"}, {"rsquo", "'"}, {"lsquo", "'"},
      {"ldquo", "\""}, {"rdquo", "\""}, {"hellip", "..."}, {"copy", "(c)"}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += '&';
      continue;
    }
    const auto name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      const std::string digits(name.substr(hex ? 2 : 1));
      char* end = nullptr;
      const unsigned long cp = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
      if (!digits.empty() && end && *end == '\0') {
        append_utf8(out, cp);
        i = semi;
        continue;
      }
    } else if (const auto it = kNamed.find(name); it != kNamed.end()) {
      out += it->second;
      i = semi;
      continue;
    }
    out += '&';
  }
  return out;
}

bool looks_like_html(std::string_view body, std::string_view content_type) {
  const std::string ct = to_lower(content_type);
  if (!ct.empty() && ct.find("html") == std::string::npos && ct.find("xml") == std::string::npos) return false;
  auto t = trim(body);
  if (t.size() >= 3 && static_cast<unsigned char>(t[0]) == 0xEF && static_cast<unsigned char>(t[1]) == 0xBB &&
      static_cast<unsigned char>(t[2]) == 0xBF) {
    t = trim(t.substr(3));
  }
  return !t.empty() && t.front() == '<';
}

}  // namespace

std::unique_ptr<StubSearchClient> StubSearchClient::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot read search map " + path.string());
  auto client = std::make_unique<StubSearchClient>();
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(Errc::ConfigError, "search map line without a tab: " + line);
    client->add(line.substr(0, tab), std::string(trim(std::string_view(line).substr(tab + 1))));
  }
  return client;
}

void StubSearchClient::add(std::string_view query, std::string url) {
  urls_[normalize_query(query)] = std::move(url);
}

std::string StubSearchClient::top_url(std::string_view query) {
  if (trim(query).empty()) throw Error(Errc::InvalidArgument, "search query is empty");
  const auto it = urls_.find(normalize_query(query));
  if (it == urls_.end()) throw Error(Errc::NoResults, "no results for '" + std::string(query) + "'");
  return it->second;
}

RemoteSearchClient::RemoteSearchClient(RemoteSearchConfig config) : config_(std::move(config)) {}

std::string RemoteSearchClient::top_url(std::string_view query) {
  if (trim(query).empty()) throw Error(Errc::InvalidArgument, "search query is empty");
  const std::string url = config_.endpoint + "?key=" + url_encode(config_.api_key) +
                          "&cx=" + url_encode(config_.engine_id) + "&num=1&q=" + url_encode(query);
  http::Response r;
  try {
    r = http::get(url, {}, config_.timeout);
  } catch (const Error& e) {
    throw Error(Errc::ClientError, std::string("search request failed: ") + e.what());
  }
  if (r.status != 200) throw Error(Errc::ClientError, "search returned HTTP " + std::to_string(r.status));
  const Json body = Json::parse(r.body, nullptr, false);
  if (body.is_discarded()) throw Error(Errc::ClientError, "search returned invalid JSON");
  if (!body.contains("items") || body["items"].empty()) {
    throw Error(Errc::NoResults, "no results for '" + std::string(query) + "'");
  }
  return body["items"][0].value("link", std::string{});
}

FixtureFetcher::FixtureFetcher(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string FixtureFetcher::fixture_name(std::string_view url) {
  return hex64(fnv1a64(trim(url))) + ".html";
}

FetchedPage FixtureFetcher::fetch(std::string_view url) {
  if (trim(url).empty()) throw Error(Errc::InvalidArgument, "url is empty");
  const auto path = dir_ / fixture_name(url);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FetchFailure, "no offline copy of " + std::string(url));
  std::ostringstream ss;
  ss << in.rdbuf();
  return {"", ss.str()};
}

RemoteFetcher::RemoteFetcher(std::chrono::seconds timeout) : timeout_(timeout) {}

FetchedPage RemoteFetcher::fetch(std::string_view url) {
  if (trim(url).empty()) throw Error(Errc::InvalidArgument, "url is empty");
  http::Response r;
  try {
    r = http::get(std::string(trim(url)), {{"User-Agent", "cha/1.0"}}, timeout_);
  } catch (const Error& e) {
    throw Error(Errc::FetchFailure, std::string(url) + ": " + e.what());
  }
  if (r.status < 200 || r.status >= 300) {
    throw Error(Errc::FetchFailure, std::string(url) + ": HTTP " + std::to_string(r.status));
  }
  return {r.content_type, std::move(r.body)};
}

std::string html_to_text(std::string_view html, std::string_view content_type, std::size_t budget) {
  if (!looks_like_html(html, content_type)) throw Error(Errc::NotHtml, "document is not HTML");

  std::string stripped;
  stripped.reserve(html.size());
  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      stripped += html[i++];
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      const auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      stripped += ' ';
      continue;
    }
    bool skipped = false;
    for (std::string_view raw : {"script", "style", "noscript", "template"}) {
      if (iequals_at(html, i + 1, raw)) {
        const std::string close = "</" + std::string(raw);
        const auto end = ifind(html, close, i + 1);
        const auto gt = end == std::string_view::npos ? end : html.find('>', end);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
        skipped = true;
        break;
      }
    }
    if (!skipped) {
      const auto gt = html.find('>', i);
      i = gt == std::string_view::npos ? html.size() : gt + 1;
    }
    stripped += ' ';
  }

  std::string text = collapse_whitespace(decode_entities(stripped));
  if (text.size() > budget) {
    std::size_t cut = budget;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    text.resize(cut);
    log::info("extract_text truncated page text to " + std::to_string(cut) + " bytes");
  }
  return text;
}

}  // namespace cha::health
