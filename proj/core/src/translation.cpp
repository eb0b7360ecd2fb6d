#include "cha/translation.hpp"

#include <array>
#include <fstream>
#include <unordered_set>

#include "cha/log.hpp"
#include "cha/text.hpp"
#include "http_client.hpp"

namespace cha {

namespace {

const std::unordered_set<std::string>& english_stopwords() {
  static const std::unordered_set<std::string> words = {
      "the", "a",    "an",   "and",  "or",    "of",   "to",   "in",   "on",    "is",
      "are", "was",  "what", "how",  "my",    "me",   "i",    "you",  "your",  "for",
      "with", "it",  "this", "that", "do",    "does", "can",  "please", "from", "at",
      "during", "by", "be",  "level", "get",  "retrieve", "average", "improve"};
  return words;
}

const std::unordered_set<std::string>& spanish_stopwords() {
  static const std::unordered_set<std::string> words = {
      "el",  "la",   "los",  "las",  "de",   "del",  "y",    "en",   "un",  "una",
      "que", "es",   "por",  "para", "con",  "mi",   "mis",  "cómo", "como", "qué",
      "cuál", "se",  "al",   "lo",   "su",   "sus",  "durante", "nivel", "hola", "paciente",
      "recupera", "estrés", "agosto", "mejorar", "sueño", "promedio", "frecuencia"};
  return words;
}

constexpr std::array<std::string_view, 12> kSpanishMarks = {"á", "é", "í", "ó", "ú", "ñ",
                                                            "¿", "¡", "Á", "É", "Ñ", "ü"};

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u) || u >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string normalize(std::string_view phrase) { return to_lower(collapse_whitespace(phrase)); }

std::string direction(const LanguageTag& src, const LanguageTag& dst) {
  return src.code() + ">" + dst.code();
}

}  // namespace

LanguageTag::LanguageTag(std::string_view code) : code_(code) {
  if (code_.size() != 2 || !std::islower(static_cast<unsigned char>(code_[0])) ||
      !std::islower(static_cast<unsigned char>(code_[1]))) {
    throw Error(Errc::UnsupportedLanguage, "'" + code_ + "' is not a two-letter lowercase tag");
  }
}

SupportedLanguages::SupportedLanguages() : SupportedLanguages(std::set<std::string>{"en", "es"}) {}

SupportedLanguages::SupportedLanguages(const std::set<std::string>& codes) {
  tags_.insert(LanguageTag::english());
  for (const auto& c : codes) tags_.insert(LanguageTag(c));
}

void SupportedLanguages::require(const LanguageTag& tag) const {
  if (!contains(tag)) throw Error(Errc::UnsupportedLanguage, tag.code());
}

LanguageTag detect_language(std::string_view text, const SupportedLanguages& supported) {
  if (trim(text).empty()) throw Error(Errc::InvalidArgument, "cannot detect the language of empty text");
  const LanguageTag es("es");
  if (!supported.contains(es)) return LanguageTag::english();

  int en_score = 0;
  int es_score = 0;
  for (const auto& w : words_of(text)) {
    if (english_stopwords().contains(w)) ++en_score;
    if (spanish_stopwords().contains(w)) ++es_score;
  }
  for (auto mark : kSpanishMarks) {
    for (auto pos = text.find(mark); pos != std::string_view::npos; pos = text.find(mark, pos + 1)) {
      ++es_score;
    }
  }
  return es_score > en_score ? es : LanguageTag::english();
}

std::unique_ptr<StubDictionaryClient> StubDictionaryClient::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open translation dictionary " + path.string());
  auto client = std::make_unique<StubDictionaryClient>();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (auto tab = line.find('\t'); tab != std::string::npos; tab = line.find('\t', start)) {
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    fields.push_back(line.substr(start));
    if (fields.size() != 4) {
      throw Error(Errc::ConfigError, path.string() + ":" + std::to_string(lineno) +
                                         ": expected 4 tab-separated fields");
    }
    client->add(LanguageTag(fields[0]), LanguageTag(fields[1]), fields[2], fields[3]);
  }
  return client;
}

void StubDictionaryClient::add(const LanguageTag& a, const LanguageTag& b, std::string phrase_a,
                               std::string phrase_b) {
  phrases_[{direction(a, b), normalize(phrase_a)}] = std::string(trim(phrase_b));
  phrases_.emplace(Key{direction(b, a), normalize(phrase_b)}, std::string(trim(phrase_a)));
}

std::string StubDictionaryClient::do_translate(const std::string& text, const LanguageTag& src,
                                               const LanguageTag& dst) {
  const auto it = phrases_.find({direction(src, dst), normalize(text)});
  if (it != phrases_.end()) return it->second;
  ++unknown_;
  log::warn("translation stub: no " + direction(src, dst) + " entry for '" +
            collapse_whitespace(text).substr(0, 80) + "', passing it through");
  return text;
}

RemoteTranslationClient::RemoteTranslationClient(std::string endpoint, std::string api_key)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)) {}

std::string RemoteTranslationClient::do_translate(const std::string& text, const LanguageTag& src,
                                                  const LanguageTag& dst) {
  Json body{{"q", text}, {"source", src.code()}, {"target", dst.code()}, {"format", "text"}};
  if (!api_key_.empty()) body["api_key"] = api_key_;
  const auto [base, path] = http::split_url(endpoint_);
  const auto res = http::post(base, path, {}, body.dump(), "application/json", std::chrono::seconds(30));
  if (res.status != 200) {
    throw Error(Errc::RemoteError, "translation endpoint returned " + std::to_string(res.status));
  }
  try {
    return Json::parse(res.body).at("translatedText").get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(Errc::RemoteError, std::string("translation reply: ") + e.what());
  }
}

std::string translate(const std::string& text, const LanguageTag& src, const LanguageTag& dst,
                      TranslationClient& client, const SupportedLanguages& supported) {
  supported.require(src);
  supported.require(dst);
  if (src == dst) return text;
  return client.translate(text, src, dst);
}

}  // namespace cha
