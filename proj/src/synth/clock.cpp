/**
 * @file clock.cpp
 */

#include "vision/synth/clock.hpp"

#include "vision/common/error.hpp"
#include "vision/common/timestamp.hpp"

#include <cmath>

namespace vision::synth {

void virtual_clock::advance_to(double t) {
    if (t < now_) throw error(error_code::invalid_argument, "virtual clock cannot move backwards");
    now_ = t;
}

auto virtual_clock::timestamp() const -> std::string {
    return format_utc(static_cast<std::int64_t>(std::floor(now_)));
}

auto time_of_day(double t) -> double {
    const double tod = std::fmod(t, seconds_per_day);
    return tod < 0 ? tod + seconds_per_day : tod;
}

}  // namespace vision::synth
