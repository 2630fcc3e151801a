/**
 * @file model.hpp
 * @brief Extraction latency and transfer rate model
 *
 * Both rates are piecewise constant over the time of day. Extraction runs
 * slower inside business hours; transfer runs faster before the am/pm
 * boundary. Defaults: 40 accessions take 9 business hours, and the morning
 * transfer rate is twice the afternoon rate.
 */

#pragma once

#include "vision/synth/clock.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace vision {
class config;
}

namespace vision::synth {

struct extraction_model {
    double business_hours_rate{40.0 / 9.0};  ///< accessions per hour
    double off_hours_rate{80.0 / 9.0};       ///< accessions per hour
    double business_start_hour{8.0};
    double business_end_hour{17.0};
    double transfer_rate_am{20e6};  ///< bytes per second
    double transfer_rate_pm{10e6};  ///< bytes per second
    double am_pm_boundary_hour{12.0};

    /// Throws vision::error(invalid_argument) for non-positive rates or a malformed day split.
    void validate() const;

    /// Keys under extraction.* and transfer.*; missing keys keep the defaults.
    [[nodiscard]] static auto from_config(const config& cfg) -> extraction_model;
};

/**
 * @brief Duration needed for `work` units from `start` under a rate that changes at fixed times of day.
 *
 * `rate_at(tod)` must be positive and constant between consecutive
 * `boundaries` (seconds since midnight, ascending, inside (0, 86400)).
 * Durations are summed from segment lengths, not differenced from absolute
 * times, so work / duration never exceeds the largest rate used.
 */
template <typename RateFn>
[[nodiscard]] auto integrate_duration(double start, double work, std::span<const double> boundaries, RateFn rate_at)
    -> double {
    double elapsed = 0;
    while (work > 0) {
        const double tod = time_of_day(start + elapsed);
        double next = seconds_per_day;
        for (const double b : boundaries) {
            if (b > tod) {
                next = b;
                break;
            }
        }
        const double span_len = next - tod;
        const double rate = rate_at(tod);
        if (work <= rate * span_len) return elapsed + work / rate;
        work -= rate * span_len;
        elapsed += span_len;
    }
    return elapsed;
}

/// Extracts the accessions one after another from clock.now(); advances the clock and returns the completion time.
auto simulate_extraction(std::span<const std::string> accessions, const extraction_model& model, virtual_clock& clock)
    -> double;

/// Virtual seconds to move `bytes` starting at `start`; a cap of 0 means uncapped.
[[nodiscard]] auto transfer_seconds(std::uint64_t bytes, const extraction_model& model, double bandwidth_cap,
                                    double start) -> double;

}  // namespace vision::synth
