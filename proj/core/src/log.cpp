#include "cha/log.hpp"

#include <iostream>
#include <mutex>

namespace cha::log {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current() {
  static Sink sink = [](Level level, std::string_view message) {
    if (level < Level::Warning) return;
    std::cerr << (level == Level::Warning ? "[warn] " : "[error] ") << message << '\n';
  };
  return sink;
}

}  // namespace

void set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  current() = std::move(sink);
}

void write(Level level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current()) current()(level, message);
}

}  // namespace cha::log
