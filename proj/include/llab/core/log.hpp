// log.hpp - leveled stderr logging, serialized across threads.
#pragma once

#include <mutex>
#include <sstream>
#include <string>

namespace llab {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level();
void set_log_level(LogLevel lvl);
LogLevel parse_log_level(const std::string& s);  // "error"|"warn"|"info"|"debug"

void log_line(LogLevel lvl, const std::string& msg);

}  // namespace llab

#define LLAB_LOG(lvl, expr)                                   \
    do {                                                      \
        if (static_cast<int>(lvl) <= static_cast<int>(::llab::log_level())) { \
            std::ostringstream os_;                           \
            os_ << expr;                                      \
            ::llab::log_line(lvl, os_.str());                 \
        }                                                     \
    } while (0)

#define LLAB_ERROR(expr) LLAB_LOG(::llab::LogLevel::kError, expr)
#define LLAB_WARN(expr) LLAB_LOG(::llab::LogLevel::kWarn, expr)
#define LLAB_INFO(expr) LLAB_LOG(::llab::LogLevel::kInfo, expr)
#define LLAB_DEBUG(expr) LLAB_LOG(::llab::LogLevel::kDebug, expr)
