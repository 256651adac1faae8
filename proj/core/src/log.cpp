#include "dsner/log.hpp"

#include <cstdlib>
#include <iostream>

namespace dsner {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("DSNER_LOG");
    if (!env) return LogLevel::Info;
    const std::string v(env);
    if (v == "quiet" || v == "0") return LogLevel::Quiet;
    if (v == "debug" || v == "2") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[dsner] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::cerr << "[dsner] " << msg << "\n";
}

}  // namespace dsner
