#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cha/error.hpp"
#include "cha/text.hpp"

namespace cha {

inline constexpr std::string_view kDatapipePrefix = "datapipe:";

struct DatapipeEntry {
  std::string key;  // canonical lowercase hyphenated UUID
  Json payload;
  std::string producer;
  std::chrono::system_clock::time_point created_at;
};

/// Raised by resolve_arguments; `position` is the offending argument index.
class UnresolvedArgument : public Error {
 public:
  UnresolvedArgument(Errc code, std::size_t position, const std::string& message)
      : Error(code, "argument " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

bool is_datapipe_reference(std::string_view text);

// Regex source matching one reference anywhere in a string.
std::string_view datapipe_reference_pattern();

/// Keyed store for intermediate task results. Each stored payload gets a
/// fresh random UUID; only the `datapipe:<uuid>` string circulates in
/// prompts. With a persistence directory every entry is also written to
/// `<dir>/<uuid>.json` and read back on a cache miss.
class DataPipe {
 public:
  DataPipe() = default;
  explicit DataPipe(std::filesystem::path persistence_dir);

  DataPipe(const DataPipe&) = delete;
  DataPipe& operator=(const DataPipe&) = delete;

  std::string store(Json payload, std::string producer);

  Json retrieve(std::string_view reference) const;
  std::optional<DatapipeEntry> entry(std::string_view reference) const;

  // Replaces every string argument that is a reference with its payload.
  std::vector<Json> resolve_arguments(std::span<const Json> args) const;

  std::size_t size() const;

 private:
  std::string new_key();
  std::optional<DatapipeEntry> load_from_disk(const std::string& key) const;

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, DatapipeEntry> entries_;
  std::optional<std::filesystem::path> dir_;
  std::mutex key_mutex_;
};

}  // namespace cha
