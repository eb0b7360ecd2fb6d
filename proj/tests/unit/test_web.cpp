#include <doctest.h>

#include <httplib.h>

#include <fstream>
#include <thread>

#include "cha/health/web.hpp"
#include "cha/text.hpp"
#include "test_support.hpp"

using namespace cha;
using namespace cha::health;
using cha::testing::errc_of;

namespace {

constexpr const char* kSleepUrl = "https://www.mayoclinic.org/healthy-lifestyle/adult-health/in-depth/sleep/art-20048379";

}  // namespace

TEST_SUITE("web") {
  TEST_CASE("stub search") {
    auto search = StubSearchClient::from_file(testing::fixtures_dir() / "search.map");
    CHECK(search->top_url("tips to improve sleep") == kSleepUrl);
    CHECK(search->top_url("  Tips   to IMPROVE sleep ") == kSleepUrl);
    CHECK(errc_of([&] { search->top_url("how to juggle"); }) == Errc::NoResults);
  }

  TEST_CASE("fixture pages") {
    FixtureFetcher fetcher(testing::fixtures_dir() / "www");
    const auto page = fetcher.fetch(kSleepUrl);
    const auto text = html_to_text(page.body, page.content_type);
    CHECK(text.rfind("Sleep tips: 6 steps to better sleep", 0) == 0);
    CHECK(text.find("<") == std::string::npos);

    auto search = StubSearchClient::from_file(testing::fixtures_dir() / "search.map");
    const auto pdf = fetcher.fetch(search->top_url("sleep study report"));
    CHECK(errc_of([&] { html_to_text(pdf.body, pdf.content_type); }) == Errc::NotHtml);
    CHECK(errc_of([&] { fetcher.fetch("https://example.org/nowhere"); }) == Errc::FetchFailure);
    CHECK(FixtureFetcher::fixture_name("") == "cbf29ce484222325.html");
  }

  TEST_CASE("html to text") {
    const std::string html =
        "<html><head><title>T</title><style>p{color:red}</style><script>var x = '<p>';</script></head>"
        "<body><!-- hidden --><p>Fish &amp; chips&nbsp;&lt;3</p>\n\n<p>caf&#233; &#xE9; &#x263A;</p></body></html>";
    CHECK(html_to_text(html) == "T Fish & chips <3 café é ☺");
    CHECK(html_to_text("<p>abc</p>", "text/html; charset=utf-8") == "abc");
    CHECK(errc_of([] { html_to_text("%PDF-1.4", "application/pdf"); }) == Errc::NotHtml);
    CHECK(errc_of([] { html_to_text("plain words"); }) == Errc::NotHtml);

    // The budget never splits a multi-byte character.
    const std::string cut = html_to_text("<p>ééééé</p>", "", 5);
    CHECK(cut == "éé");
  }

  TEST_CASE("remote search and fetch against a local server") {
    httplib::Server server;
    server.Get("/search", [](const httplib::Request& req, httplib::Response& res) {
      if (req.get_param_value("q") == "tips to improve sleep" && req.get_param_value("key") == "k") {
        res.set_content(R"({"items":[{"link":"https://a.example/1"},{"link":"https://b.example/2"}]})",
                        "application/json");
      } else {
        res.set_content(R"({"searchInformation":{"totalResults":"0"}})", "application/json");
      }
    });
    server.Get("/page", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<p>hello</p>", "text/html");
    });
    server.Get("/missing", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const std::string base = "http://127.0.0.1:" + std::to_string(port);

    RemoteSearchClient search({base + "/search", "k", "cx", std::chrono::seconds{5}});
    CHECK(search.top_url("tips to improve sleep") == "https://a.example/1");
    CHECK(errc_of([&] { search.top_url("nothing"); }) == Errc::NoResults);

    RemoteFetcher fetcher(std::chrono::seconds{5});
    const auto page = fetcher.fetch(base + "/page");
    CHECK(page.content_type.find("text/html") == 0);
    CHECK(html_to_text(page.body, page.content_type) == "hello");
    CHECK(errc_of([&] { fetcher.fetch(base + "/missing"); }) == Errc::FetchFailure);
    CHECK(errc_of([&] { fetcher.fetch("not a url"); }) == Errc::FetchFailure);

    server.stop();
    thread.join();
  }
}
