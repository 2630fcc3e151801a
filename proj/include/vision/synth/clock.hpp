/**
 * @file clock.hpp
 * @brief Virtual clock for the clinical-side simulation
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vision::synth {

inline constexpr double seconds_per_day = 86400.0;
inline constexpr double seconds_per_hour = 3600.0;

/// 2020-01-06T08:00:00Z, a Monday at business-day open.
inline constexpr std::int64_t default_clock_start = 1578297600;

struct clock_event {
    double at{};
    std::string what;
};

/// Seconds since the Unix epoch; never moves backwards.
class virtual_clock {
public:
    explicit virtual_clock(double start = static_cast<double>(default_clock_start)) : now_(start) {}

    [[nodiscard]] auto now() const -> double { return now_; }
    /// Throws vision::error(invalid_argument) if `t` is earlier than now().
    void advance_to(double t);
    void advance_by(double seconds) { advance_to(now_ + seconds); }
    /// now() rounded down to a whole second, as YYYY-MM-DDTHH:MM:SSZ.
    [[nodiscard]] auto timestamp() const -> std::string;

    void record(std::string what) { events_.push_back({now_, std::move(what)}); }
    [[nodiscard]] auto events() const -> const std::vector<clock_event>& { return events_; }

private:
    double now_;
    std::vector<clock_event> events_;
};

/// Seconds since midnight UTC.
[[nodiscard]] auto time_of_day(double t) -> double;

}  // namespace vision::synth
