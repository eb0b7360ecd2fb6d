#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "cha/error.hpp"

namespace cha {

/// Two-letter lowercase language code.
class LanguageTag {
 public:
  LanguageTag() : code_("en") {}
  explicit LanguageTag(std::string_view code);

  const std::string& code() const noexcept { return code_; }
  bool operator==(const LanguageTag&) const = default;
  auto operator<=>(const LanguageTag&) const = default;

  static LanguageTag english() { return LanguageTag(); }

 private:
  std::string code_;
};

class SupportedLanguages {
 public:
  SupportedLanguages();  // {"en", "es"}
  explicit SupportedLanguages(const std::set<std::string>& codes);  // "en" is always added

  bool contains(const LanguageTag& tag) const { return tags_.contains(tag); }
  // Throws UnsupportedLanguage.
  void require(const LanguageTag& tag) const;
  const std::set<LanguageTag>& tags() const noexcept { return tags_; }

 private:
  std::set<LanguageTag> tags_;
};

/// Stopword and diacritic vote over the supported languages; ties and
/// unknown text fall back to English. Throws InvalidArgument on blank text.
LanguageTag detect_language(std::string_view text, const SupportedLanguages& supported);

class TranslationClient {
 public:
  virtual ~TranslationClient() = default;

  std::string translate(const std::string& text, const LanguageTag& src, const LanguageTag& dst) {
    ++calls_;
    return do_translate(text, src, dst);
  }

  std::size_t call_count() const noexcept { return calls_; }

 protected:
  virtual std::string do_translate(const std::string& text, const LanguageTag& src,
                                   const LanguageTag& dst) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
};

/// Offline client backed by phrase pairs. Lookups ignore case and
/// surrounding whitespace and work in both directions. Unknown phrases
/// come back verbatim with a logged warning.
class StubDictionaryClient final : public TranslationClient {
 public:
  StubDictionaryClient() = default;

  // Tab-separated records: src_lang, dst_lang, src_phrase, dst_phrase.
  static std::unique_ptr<StubDictionaryClient> from_file(const std::filesystem::path& path);

  void add(const LanguageTag& a, const LanguageTag& b, std::string phrase_a, std::string phrase_b);

  std::size_t unknown_phrases() const noexcept { return unknown_; }

 protected:
  std::string do_translate(const std::string& text, const LanguageTag& src,
                           const LanguageTag& dst) override;

 private:
  using Key = std::pair<std::string, std::string>;  // "src>dst", normalized phrase
  std::map<Key, std::string> phrases_;
  std::atomic<std::size_t> unknown_{0};
};

/// JSON POST `{q, source, target, format}` -> `{translatedText}`.
class RemoteTranslationClient final : public TranslationClient {
 public:
  RemoteTranslationClient(std::string endpoint, std::string api_key = {});

 protected:
  std::string do_translate(const std::string& text, const LanguageTag& src,
                           const LanguageTag& dst) override;

 private:
  std::string endpoint_;
  std::string api_key_;
};

/// Same-language pairs never reach the client.
std::string translate(const std::string& text, const LanguageTag& src, const LanguageTag& dst,
                      TranslationClient& client, const SupportedLanguages& supported);

}  // namespace cha
