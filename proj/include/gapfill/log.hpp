#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace gapfill::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from the GAPFILL_LOG env var: error|warn|info|debug. Default warn.
inline Level threshold() {
    static const Level lvl = [] {
        const char* env = std::getenv("GAPFILL_LOG");
        if (!env) return Level::warn;
        const std::string s(env);
        if (s == "error") return Level::error;
        if (s == "warn") return Level::warn;
        if (s == "info") return Level::info;
        if (s == "debug") return Level::debug;
        return Level::warn;
    }();
    return lvl;
}

template <typename... Args>
void emit(Level lvl, const char* tag, const char* fmt, Args... args) {
    if (lvl > threshold()) return;
    std::fprintf(stderr, "[gapfill %s] ", tag);
    if constexpr (sizeof...(Args) == 0)
        std::fputs(fmt, stderr);
    else
        std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
}

template <typename... Args>
void error(const char* fmt, Args... args) { emit(Level::error, "error", fmt, args...); }
template <typename... Args>
void warn(const char* fmt, Args... args) { emit(Level::warn, "warn", fmt, args...); }
template <typename... Args>
void info(const char* fmt, Args... args) { emit(Level::info, "info", fmt, args...); }
template <typename... Args>
void debug(const char* fmt, Args... args) { emit(Level::debug, "debug", fmt, args...); }

} // namespace gapfill::log
