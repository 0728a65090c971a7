#include "fracmem/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace fracmem::log {

namespace {

Level parse_env() {
    const char* env = std::getenv("FRACMEM_LOG");
    if (!env) return Level::warn;
    const std::string v(env);
    if (v == "error") return Level::error;
    if (v == "warn" || v == "warning") return Level::warn;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
}

const char* tag(Level lvl) {
    switch (lvl) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        default: return "debug";
    }
}

std::mutex io_mutex;

}  // namespace

Level level() {
    static const Level lvl = parse_env();
    return lvl;
}

void write(Level lvl, const std::string& msg) {
    if (static_cast<int>(lvl) > static_cast<int>(level())) return;
    std::lock_guard<std::mutex> lock(io_mutex);
    std::cerr << "[fracmem " << tag(lvl) << "] " << msg << "\n";
}

}  // namespace fracmem::log
