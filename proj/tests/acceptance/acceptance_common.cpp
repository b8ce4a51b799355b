#include "acceptance_common.hpp"

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <iostream>

namespace tsf::acceptance {

std::string format(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    va_list copy;
    va_copy(copy, args);
    const int n = std::vsnprintf(nullptr, 0, fmt, copy);
    va_end(copy);
    std::string out(static_cast<std::size_t>(n > 0 ? n : 0), '\0');
    if (n > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, args);
    va_end(args);
    return out;
}

void Board::run(const std::string& id, const std::string& title, double budget_seconds,
                const std::function<Verdict()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = fn();
    } catch (const std::exception& e) {
        v = {Status::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (v.status == Status::pass && secs > budget_seconds) {
        v = {Status::fail, v.detail + format("; over the %.0f s budget", budget_seconds)};
    }
    const char* tag = v.status == Status::pass ? "PASS" : v.status == Status::fail ? "FAIL" : "BLOCKED";
    switch (v.status) {
    case Status::pass: ++passed_; break;
    case Status::fail: ++failures_; break;
    case Status::blocked: ++blocked_; break;
    }
    std::cout << format("%-7s %-4s %s: %s [%.2f s]", tag, id.c_str(), title.c_str(), v.detail.c_str(), secs) << std::endl;
}

void Board::summary() const {
    std::cout << format("%d passed, %d failed, %d blocked", passed_, failures_, blocked_) << std::endl;
}

} // namespace tsf::acceptance
