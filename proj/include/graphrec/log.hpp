#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace graphrec::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("GRAPHREC_LOG");
        if (!env) return Level::Warn;
        std::string s(env);
        if (s == "error") return Level::Error;
        if (s == "info") return Level::Info;
        if (s == "debug") return Level::Debug;
        return Level::Warn;
    }();
    return lvl;
}

inline void write(Level lvl, const std::string& msg) {
    if (lvl > threshold()) return;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    const char* tag = lvl == Level::Error ? "ERROR"
                      : lvl == Level::Warn ? "WARN"
                      : lvl == Level::Info ? "INFO"
                                           : "DEBUG";
    std::cerr << "[graphrec " << tag << "] " << msg << '\n';
}

inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void debug(const std::string& msg) { write(Level::Debug, msg); }

} // namespace graphrec::log
