#ifndef LAXFLOW_TOOLS_LOGGING_HPP
#define LAXFLOW_TOOLS_LOGGING_HPP

#include <cstdlib>
#include <ostream>
#include <string>
#include <string_view>

namespace laxflow::cli {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Diagnostics to a stream, filtered by LAXFLOW_LOG (error|info|debug, default error).
class Logger {
 public:
  Logger(std::ostream& sink, LogLevel level) : sink_(sink), level_(level) {}

  static LogLevel level_from_env() {
    const char* raw = std::getenv("LAXFLOW_LOG");
    if (raw == nullptr) return LogLevel::Error;
    const std::string_view v(raw);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Error;
  }

  void error(std::string_view msg) const { write(LogLevel::Error, "error", msg); }
  void info(std::string_view msg) const { write(LogLevel::Info, "info", msg); }
  void debug(std::string_view msg) const { write(LogLevel::Debug, "debug", msg); }

 private:
  void write(LogLevel at, std::string_view tag, std::string_view msg) const {
    if (static_cast<int>(at) <= static_cast<int>(level_)) sink_ << "laxflow: " << tag << ": " << msg << '\n';
  }

  std::ostream& sink_;
  LogLevel level_;
};

}  // namespace laxflow::cli

#endif  // LAXFLOW_TOOLS_LOGGING_HPP
