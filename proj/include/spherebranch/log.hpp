#pragma once

#include <string>

namespace spherebranch {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Level read once from SPHEREBRANCH_LOG (error | info | debug); default error.
LogLevel log_level();
void set_log_level(LogLevel level);

/// Writes "[level] message" to stderr when `level` is enabled.
void log(LogLevel level, const std::string& message);

}  // namespace spherebranch
