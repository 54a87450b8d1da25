#include "chemo/core.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace chemo {

namespace {

void stderr_sink(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

std::mutex g_mutex;
std::set<std::string> g_seen;
WarningSink g_sink = &stderr_sink;

}  // namespace

void warn_once(const std::string& message) {
    std::lock_guard lock(g_mutex);
    if (!g_seen.insert(message).second) return;
    g_sink(message);
}

WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard lock(g_mutex);
    g_seen.clear();
    WarningSink previous = g_sink;
    g_sink = sink ? sink : &stderr_sink;
    return previous;
}

}  // namespace chemo
