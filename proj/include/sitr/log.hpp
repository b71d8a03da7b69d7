#pragma once

#include <string>

namespace sitr::log {

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Threshold comes from the SITR_LOG environment variable
// (error|warn|info|debug), read once. Default is warn.
Level threshold();

bool enabled(Level level);

void emit(Level level, const std::string& message);

inline void error(const std::string& m) { emit(Level::kError, m); }
inline void warn(const std::string& m) { emit(Level::kWarn, m); }
inline void info(const std::string& m) { emit(Level::kInfo, m); }
inline void debug(const std::string& m) { emit(Level::kDebug, m); }

}  // namespace sitr::log
