#pragma once

#include <string>

namespace dsner {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

/// Verbosity comes from the DSNER_LOG environment variable
/// (quiet|info|debug); messages go to stderr.
LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace dsner
