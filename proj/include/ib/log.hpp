#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace ib {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Verbosity from IB_LOG_LEVEL (error|warn|info|debug); default warn.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("IB_LOG_LEVEL");
    if (!env) return LogLevel::Warn;
    const std::string s(env);
    if (s == "error") return LogLevel::Error;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

inline void log_line(LogLevel lvl, const std::string& msg) {
  if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[ib:" << names[static_cast<int>(lvl)] << "] " << msg << "\n";
}

}  // namespace ib

#define IB_LOG_AT(level, expr)                 \
  do {                                         \
    std::ostringstream ib_log_ss;              \
    ib_log_ss << expr;                         \
    ::ib::log_line(level, ib_log_ss.str());    \
  } while (0)

#define IB_LOG_ERROR(expr) IB_LOG_AT(::ib::LogLevel::Error, expr)
#define IB_LOG_WARN(expr) IB_LOG_AT(::ib::LogLevel::Warn, expr)
#define IB_LOG_INFO(expr) IB_LOG_AT(::ib::LogLevel::Info, expr)
#define IB_LOG_DEBUG(expr) IB_LOG_AT(::ib::LogLevel::Debug, expr)
