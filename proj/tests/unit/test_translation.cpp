#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "cha/executor.hpp"
#include "cha/translation.hpp"
#include "test_support.hpp"

using namespace cha;

namespace {

const LanguageTag en("en");
const LanguageTag es("es");

// Counts calls and tags the text so a call is visible in the output.
class TaggingClient final : public TranslationClient {
 protected:
  std::string do_translate(const std::string& text, const LanguageTag& src, const LanguageTag& dst) override {
    return "[" + src.code() + ">" + dst.code() + "]" + text;
  }
};

class FailingClient final : public TranslationClient {
 protected:
  std::string do_translate(const std::string&, const LanguageTag&, const LanguageTag&) override {
    throw Error(Errc::TranslationFailure, "offline");
  }
};

}  // namespace

TEST_SUITE("translation") {
  TEST_CASE("language tags") {
    CHECK(LanguageTag("es").code() == "es");
    CHECK_THROWS_AS(LanguageTag("ES"), Error);
    CHECK_THROWS_AS(LanguageTag("spa"), Error);
    const SupportedLanguages langs({"es"});
    CHECK(langs.contains(en));
    CHECK_THROWS_AS(langs.require(LanguageTag("fr")), Error);
  }

  TEST_CASE("detection") {
    const SupportedLanguages langs;
    CHECK(detect_language("How to improve my sleep?", langs) == en);
    CHECK(detect_language("¿Cómo puedo mejorar mi sueño?", langs) == es);
    CHECK(detect_language("¿Cuál es el nivel de estrés del paciente 5?", langs) == es);
    CHECK(detect_language("12345", langs) == en);
    CHECK(detect_language("¿Cómo?", SupportedLanguages({"en"})) == en);
    CHECK_THROWS_AS(detect_language("   ", langs), Error);
  }

  TEST_CASE("same-language pairs are the identity and never call the client") {
    TaggingClient client;
    const SupportedLanguages langs;
    for (const char* text : {"", "hello", "¿Cómo?", "datapipe:6d808840-1fbe-45a5-859a-abfbfee93d0e"}) {
      CHECK(translate(text, en, en, client, langs) == text);
      CHECK(translate(text, es, es, client, langs) == text);
    }
    CHECK(client.call_count() == 0);
    CHECK(translate("x", es, en, client, langs) == "[es>en]x");
    CHECK(client.call_count() == 1);
    CHECK_THROWS_AS(translate("x", LanguageTag("fr"), en, client, langs), Error);
  }

  TEST_CASE("stub dictionary works both ways") {
    auto client = StubDictionaryClient::from_file(testing::fixtures_dir() / "translations.tsv");
    const SupportedLanguages langs;
    const std::string english = translate("¿Cómo puedo mejorar mi sueño?", es, en, *client, langs);
    CHECK(english == "How to improve my sleep?");
    CHECK(translate("  how TO improve   my sleep? ", en, es, *client, langs) == "¿Cómo puedo mejorar mi sueño?");
    CHECK(client->unknown_phrases() == 0);
    CHECK(translate("unlisted phrase", es, en, *client, langs) == "unlisted phrase");
    CHECK(client->unknown_phrases() == 1);
  }

  TEST_CASE("malformed dictionary lines are config errors") {
    testing::TempDir dir;
    std::ofstream(dir.path() / "bad.tsv") << "es\ten\tonly three\n";
    CHECK_THROWS_WITH_AS(StubDictionaryClient::from_file(dir.path() / "bad.tsv"), doctest::Contains("ConfigError"),
                         Error);
    CHECK_THROWS_AS(StubDictionaryClient::from_file(dir.path() / "missing.tsv"), Error);
  }

  TEST_CASE("prepare_input modes") {
    const SupportedLanguages langs;
    TaggingClient client;
    auto in = prepare_input("  ¿Cómo mejorar mi sueño? ", {}, LangMode::Retain, std::nullopt, langs, &client);
    CHECK(in.question == "¿Cómo mejorar mi sueño?");
    CHECK(in.source_language == es);
    CHECK_FALSE(in.translated);
    CHECK(client.call_count() == 0);

    in = prepare_input("¿Cómo mejorar mi sueño?", {}, LangMode::Translate, std::nullopt, langs, &client);
    CHECK(in.translated);
    CHECK(in.question == "[es>en]¿Cómo mejorar mi sueño?");

    in = prepare_input("hola", {}, LangMode::Translate, es, langs, &client);
    CHECK(in.source_language == es);

    const MetadataItem item{"image", "datapipe:6d808840-1fbe-45a5-859a-abfbfee93d0e", "plate"};
    in = prepare_input("How is my meal?", std::span(&item, 1), LangMode::Translate, std::nullopt, langs, &client);
    CHECK(in.metadata == std::vector<std::string>{"image: datapipe:6d808840-1fbe-45a5-859a-abfbfee93d0e (plate)"});
    CHECK_THROWS_AS(prepare_input(" ", {}, LangMode::Retain, std::nullopt, langs, &client), Error);
    CHECK_THROWS_AS(prepare_input("x", {}, LangMode::Retain, LanguageTag("fr"), langs, &client), Error);
  }

  TEST_CASE("a failing client degrades to retain mode") {
    FailingClient client;
    const auto in = prepare_input("¿Cómo mejorar mi sueño?", {}, LangMode::Translate, std::nullopt,
                                  SupportedLanguages(), &client);
    CHECK_FALSE(in.translated);
    CHECK(in.question == "¿Cómo mejorar mi sueño?");
    CHECK(in.source_language == es);
  }

  TEST_CASE("remote client speaks the JSON protocol") {
    httplib::Server server;
    Json seen;
    server.Post("/translate", [&](const httplib::Request& req, httplib::Response& res) {
      seen = Json::parse(req.body);
      res.set_content(Json{{"translatedText", "hello"}}.dump(), "application/json");
    });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const std::string base = "http://127.0.0.1:" + std::to_string(port);
    RemoteTranslationClient client(base + "/translate", "k");
    CHECK(client.translate("hola", es, en) == "hello");
    CHECK(seen == Json{{"q", "hola"}, {"source", "es"}, {"target", "en"}, {"format", "text"}, {"api_key", "k"}});
    RemoteTranslationClient broken(base + "/broken");
    CHECK_THROWS_WITH_AS(broken.translate("hola", es, en), doctest::Contains("RemoteError"), Error);
    server.stop();
    t.join();
  }
}
