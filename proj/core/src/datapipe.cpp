#include "cha/datapipe.hpp"

#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/uuid_io.hpp>

#include <fstream>

namespace cha {

namespace {

constexpr std::string_view kPattern =
    "datapipe:[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}";

std::string key_of(std::string_view reference) {
  if (!is_datapipe_reference(reference)) {
    throw Error(Errc::MalformedKey, std::string(reference));
  }
  return std::string(reference.substr(kDatapipePrefix.size()));
}

boost::uuids::random_generator& generator() {
  static boost::uuids::random_generator gen;
  return gen;
}

}  // namespace

bool is_datapipe_reference(std::string_view text) {
  if (!text.starts_with(kDatapipePrefix)) return false;
  text.remove_prefix(kDatapipePrefix.size());
  if (text.size() != 36) return false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (c != '-') return false;
    } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      return false;
    }
  }
  return true;
}

std::string_view datapipe_reference_pattern() { return kPattern; }

DataPipe::DataPipe(std::filesystem::path persistence_dir) : dir_(std::move(persistence_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(*dir_, ec);
  if (ec) throw Error(Errc::StorageFailure, "cannot create " + dir_->string() + ": " + ec.message());
}

std::string DataPipe::new_key() {
  std::lock_guard lock(key_mutex_);
  return boost::uuids::to_string(generator()());
}

std::string DataPipe::store(Json payload, std::string producer) {
  DatapipeEntry entry{new_key(), std::move(payload), std::move(producer),
                      std::chrono::system_clock::now()};
  if (dir_) {
    const Json record{{"producer", entry.producer},
                      {"created_at", std::chrono::duration_cast<std::chrono::milliseconds>(
                                         entry.created_at.time_since_epoch())
                                         .count()},
                      {"payload", entry.payload}};
    std::ofstream out(*dir_ / (entry.key + ".json"));
    out << record.dump();
    if (!out) throw Error(Errc::StorageFailure, "cannot write entry " + entry.key);
  }
  std::string reference = std::string(kDatapipePrefix) + entry.key;
  std::unique_lock lock(mutex_);
  const auto [it, inserted] = entries_.emplace(entry.key, std::move(entry));
  if (!inserted) throw Error(Errc::StorageFailure, "key collision " + it->first);
  return reference;
}

std::optional<DatapipeEntry> DataPipe::load_from_disk(const std::string& key) const {
  if (!dir_) return std::nullopt;
  std::ifstream in(*dir_ / (key + ".json"));
  if (!in) return std::nullopt;
  try {
    const Json record = Json::parse(in);
    return DatapipeEntry{key, record.at("payload"), record.value("producer", std::string{}),
                         std::chrono::system_clock::time_point(
                             std::chrono::milliseconds(record.value("created_at", 0LL)))};
  } catch (const Json::exception& e) {
    throw Error(Errc::StorageFailure, "corrupt entry " + key + ": " + e.what());
  }
}

std::optional<DatapipeEntry> DataPipe::entry(std::string_view reference) const {
  const std::string key = key_of(reference);
  {
    std::shared_lock lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  return load_from_disk(key);
}

Json DataPipe::retrieve(std::string_view reference) const {
  if (auto e = entry(reference)) return std::move(e->payload);
  throw Error(Errc::UnknownKey, std::string(reference));
}

std::vector<Json> DataPipe::resolve_arguments(std::span<const Json> args) const {
  std::vector<Json> out;
  out.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    const Json& arg = args[i];
    if (arg.is_string() && is_datapipe_reference(arg.get_ref<const std::string&>())) {
      auto e = entry(arg.get_ref<const std::string&>());
      if (!e) throw UnresolvedArgument(Errc::UnknownKey, i, arg.get<std::string>());
      out.push_back(std::move(e->payload));
    } else {
      out.push_back(arg);
    }
  }
  return out;
}

std::size_t DataPipe::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

}  // namespace cha
