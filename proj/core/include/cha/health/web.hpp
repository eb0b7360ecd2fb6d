#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace cha::health {

inline constexpr std::size_t kDefaultTextBudget = 8000;

class SearchClient {
 public:
  virtual ~SearchClient() = default;
  /// URL of the top result. Throws NoResults or ClientError.
  virtual std::string top_url(std::string_view query) = 0;
};

/// Offline search: a tab-separated `query<TAB>url` map. Queries match
/// case-insensitively after whitespace collapsing.
class StubSearchClient final : public SearchClient {
 public:
  static std::unique_ptr<StubSearchClient> from_file(const std::filesystem::path& path);
  void add(std::string_view query, std::string url);
  std::string top_url(std::string_view query) override;

 private:
  std::map<std::string, std::string, std::less<>> urls_;
};

struct RemoteSearchConfig {
  std::string endpoint = "https://www.googleapis.com/customsearch/v1";
  std::string api_key;
  std::string engine_id;  // "cx"
  std::chrono::seconds timeout{20};
};

/// Custom Search JSON API client.
class RemoteSearchClient final : public SearchClient {
 public:
  explicit RemoteSearchClient(RemoteSearchConfig config);
  std::string top_url(std::string_view query) override;

 private:
  RemoteSearchConfig config_;
};

struct FetchedPage {
  std::string content_type;  // may be empty when unknown
  std::string body;
};

class PageFetcher {
 public:
  virtual ~PageFetcher() = default;
  /// Throws FetchFailure.
  virtual FetchedPage fetch(std::string_view url) = 0;
};

/// Offline fetcher: `<dir>/<fnv1a64-hex(url)>.html`.
class FixtureFetcher final : public PageFetcher {
 public:
  explicit FixtureFetcher(std::filesystem::path dir);
  FetchedPage fetch(std::string_view url) override;
  static std::string fixture_name(std::string_view url);

 private:
  std::filesystem::path dir_;
};

class RemoteFetcher final : public PageFetcher {
 public:
  explicit RemoteFetcher(std::chrono::seconds timeout = std::chrono::seconds{20});
  FetchedPage fetch(std::string_view url) override;

 private:
  std::chrono::seconds timeout_;
};

/// Visible text of an HTML document: script, style and comments dropped,
/// tags removed, common entities decoded, whitespace collapsed, then cut to
/// at most `budget` bytes on a UTF-8 boundary. Throws NotHtml.
std::string html_to_text(std::string_view html, std::string_view content_type = {},
                         std::size_t budget = kDefaultTextBudget);

}  // namespace cha::health
