#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace mmfp {

enum class LogLevel : int { error = 0, info = 1, debug = 2 };

// Level comes from MMFP_LOG (error|info|debug), default info.
inline LogLevel log_level() {
    static LogLevel lvl = [] {
        const char* e = std::getenv("MMFP_LOG");
        if (!e) return LogLevel::info;
        if (std::strcmp(e, "error") == 0) return LogLevel::error;
        if (std::strcmp(e, "debug") == 0) return LogLevel::debug;
        return LogLevel::info;
    }();
    return lvl;
}

inline void log_msg(LogLevel lvl, const std::string& msg) {
    if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
    const char* tag = lvl == LogLevel::error ? "error" : lvl == LogLevel::info ? "info" : "debug";
    std::fprintf(stderr, "[mmfp:%s] %s\n", tag, msg.c_str());
}

inline void log_error(const std::string& msg) { log_msg(LogLevel::error, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::debug, msg); }

// Subsystem-tagged variants: "[mmfp:info] train-flow: ...".
inline void log_error(const std::string& tag, const std::string& msg) { log_msg(LogLevel::error, tag + ": " + msg); }
inline void log_info(const std::string& tag, const std::string& msg) { log_msg(LogLevel::info, tag + ": " + msg); }
inline void log_debug(const std::string& tag, const std::string& msg) { log_msg(LogLevel::debug, tag + ": " + msg); }

} // namespace mmfp
