#include "sitr/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace sitr::log {

static Level parse_env() {
  const char* v = std::getenv("SITR_LOG");
  if (!v) return Level::kWarn;
  if (std::strcmp(v, "error") == 0) return Level::kError;
  if (std::strcmp(v, "warn") == 0) return Level::kWarn;
  if (std::strcmp(v, "info") == 0) return Level::kInfo;
  if (std::strcmp(v, "debug") == 0) return Level::kDebug;
  return Level::kWarn;
}

Level threshold() {
  static Level cached = parse_env();
  return cached;
}

bool enabled(Level level) {
  return static_cast<int>(level) <= static_cast<int>(threshold());
}

void emit(Level level, const std::string& message) {
  if (!enabled(level)) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)],
               message.c_str());
}

}  // namespace sitr::log
