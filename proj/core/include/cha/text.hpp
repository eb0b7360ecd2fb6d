#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace cha {

using Json = nlohmann::json;

std::string_view trim(std::string_view text) noexcept;

// Replaces every run of whitespace with one space and trims both ends.
std::string collapse_whitespace(std::string_view text);

std::vector<std::string> split_lines(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string to_lower(std::string_view text);

// FNV-1a, 64 bit. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

std::string hex64(std::uint64_t value);

// Renders a value the way a Python dict/list prints it: strings in single
// quotes inside containers, bare at top level. Used for every payload that
// is shown to an LLM.
std::string render_value(const Json& value);

// Same as render_value but quotes top-level strings too.
std::string render_value_quoted(const Json& value);

std::string base64_encode(std::string_view bytes);

}  // namespace cha
