#include "spherebranch/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace spherebranch {

namespace {

LogLevel from_env() {
  const char* v = std::getenv("SPHEREBRANCH_LOG");
  if (!v) return LogLevel::Error;
  const std::string_view s(v);
  if (s == "debug") return LogLevel::Debug;
  if (s == "info") return LogLevel::Info;
  return LogLevel::Error;
}

std::atomic<int>& level_slot() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_slot().load()); }

void set_log_level(LogLevel level) { level_slot() = static_cast<int>(level); }

void log(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > level_slot().load()) return;
  static std::mutex mu;
  static constexpr const char* names[] = {"error", "info", "debug"};
  std::lock_guard lock(mu);
  std::cerr << '[' << names[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace spherebranch
