#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace scalesep {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Level comes from SCALESEP_LOG (error|info|debug), default error.
inline LogLevel log_level() {
  static LogLevel lvl = [] {
    const char* e = std::getenv("SCALESEP_LOG");
    if (!e) return LogLevel::Error;
    if (std::strcmp(e, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(e, "info") == 0) return LogLevel::Info;
    return LogLevel::Error;
  }();
  return lvl;
}

template <class... Args>
void log_info(const char* fmt, Args... args) {
  if (log_level() >= LogLevel::Info) {
    std::fprintf(stderr, "[scalesep] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

template <class... Args>
void log_debug(const char* fmt, Args... args) {
  if (log_level() >= LogLevel::Debug) {
    std::fprintf(stderr, "[scalesep:debug] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

template <class... Args>
void log_error(const char* fmt, Args... args) {
  std::fprintf(stderr, "[scalesep:error] ");
  std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

}  // namespace scalesep
