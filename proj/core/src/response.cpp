#include "cha/response.hpp"

#include <regex>

#include "cha/prompts.hpp"

namespace cha {

namespace {

// Looser than the canonical key grammar so that truncated or mangled keys
// echoed by a model are dropped as well.
const std::regex& key_regex() {
  static const std::regex re(R"(['"`]?datapipe:[0-9A-Za-z\-]*['"`]?)");
  return re;
}

const std::regex& address_regex() {
  static const std::regex re(R"(address:\[[^\]]*\])");
  return re;
}

std::string strip_keys(const std::string& segment) {
  return std::regex_replace(segment, key_regex(), "");
}

}  // namespace

std::string_view thinker_directive() {
  return PromptTemplates::defaults().get(PromptTemplates::kThinkerDirective);
}

std::string build_thinker_prompt(const ThinkerBundle& bundle, const PromptTemplates& templates) {
  std::string_view prefix = bundle.prefix;
  if (!prefix.empty() && prefix.back() == '.') prefix.remove_suffix(1);
  return fill(templates.get(PromptTemplates::kThinker),
              {{"metadata", bundle.metadata},
               {"history", bundle.history},
               {"actions", bundle.actions},
               {"prefix", std::string(prefix)},
               {"directive", templates.get(PromptTemplates::kThinkerDirective)},
               {"question", bundle.question}});
}

std::string sanitize_answer(std::string_view text) {
  const std::string input(text);
  std::string out;
  auto begin = std::sregex_iterator(input.begin(), input.end(), address_regex());
  std::size_t pos = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto start = static_cast<std::size_t>(it->position());
    out += strip_keys(input.substr(pos, start - pos));
    out += it->str();
    pos = start + static_cast<std::size_t>(it->length());
  }
  out += strip_keys(input.substr(pos));
  return out;
}

std::string generate_response(const ThinkerBundle& bundle, llm::ChatBackend& backend,
                              const llm::CompletionParams& params,
                              const PromptTemplates& templates) {
  return sanitize_answer(
      llm::complete_prompt(backend, build_thinker_prompt(bundle, templates), params));
}

}  // namespace cha
