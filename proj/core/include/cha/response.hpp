#pragma once

#include <string>
#include <string_view>

#include "cha/llm.hpp"
#include "cha/prompts.hpp"

namespace cha {

/// Everything the final-answer prompt is assembled from. `actions` is the
/// output of format_previous_actions; `prefix` is the deployment hook
/// spliced at the head of the system directive.
struct ThinkerBundle {
  std::string metadata;
  std::string history;
  std::string actions;
  std::string prefix;
  std::string question;
};

// Fixed system directive following the prefix. Always carries the
// trusted-source and key-suppression clauses.
std::string_view thinker_directive();

std::string build_thinker_prompt(const ThinkerBundle& bundle,
                                 const PromptTemplates& templates = PromptTemplates::defaults());

/// Removes every data pipe reference (and quotes hugging it) outside
/// `address:[...]` spans, which are kept byte-identical.
std::string sanitize_answer(std::string_view text);

std::string generate_response(const ThinkerBundle& bundle, llm::ChatBackend& backend,
                              const llm::CompletionParams& params,
                              const PromptTemplates& templates = PromptTemplates::defaults());

}  // namespace cha
