#pragma once

#include <functional>
#include <string>
#include <vector>

namespace tsf::acceptance {

enum class Status { pass, fail, blocked };

struct Verdict {
    Status status = Status::pass;
    std::string detail;

    static Verdict check(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }
    static Verdict blocked(std::string detail) { return {Status::blocked, std::move(detail)}; }
};

/// Prints one line per criterion: STATUS, id, title, detail and wall time.
/// A criterion that exceeds its time budget fails even if its checks held.
class Board {
public:
    void run(const std::string& id, const std::string& title, double budget_seconds, const std::function<Verdict()>& fn);
    [[nodiscard]] int failures() const { return failures_; }
    [[nodiscard]] int blocked() const { return blocked_; }
    [[nodiscard]] int passed() const { return passed_; }
    /// Prints the tally line.
    void summary() const;

private:
    int passed_ = 0;
    int failures_ = 0;
    int blocked_ = 0;
};

/// printf-style formatting into a std::string.
[[nodiscard]] std::string format(const char* fmt, ...);

} // namespace tsf::acceptance
