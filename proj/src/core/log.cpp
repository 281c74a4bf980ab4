#include "llab/core/log.hpp"

#include <atomic>
#include <iostream>
#include <stdexcept>

namespace llab {

namespace {
std::atomic<int> g_level{static_cast<int>(LogLevel::kWarn)};
std::mutex g_mu;
const char* kNames[] = {"error", "warn", "info", "debug"};
}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(g_level.load()); }

void set_log_level(LogLevel lvl) { g_level.store(static_cast<int>(lvl)); }

LogLevel parse_log_level(const std::string& s) {
    for (int i = 0; i < 4; ++i) {
        if (s == kNames[i]) return static_cast<LogLevel>(i);
    }
    throw std::invalid_argument("unknown log level: " + s);
}

void log_line(LogLevel lvl, const std::string& msg) {
    std::lock_guard<std::mutex> lk(g_mu);
    std::cerr << "[" << kNames[static_cast<int>(lvl)] << "] " << msg << "\n";
}

}  // namespace llab
