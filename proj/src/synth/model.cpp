/**
 * @file model.cpp
 */

#include "vision/synth/model.hpp"

#include "vision/common/config.hpp"
#include "vision/common/error.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace vision::synth {

void extraction_model::validate() const {
    if (!(business_hours_rate > 0) || !(off_hours_rate > 0) || !(transfer_rate_am > 0) || !(transfer_rate_pm > 0)) {
        throw error(error_code::invalid_argument, "extraction and transfer rates must be positive");
    }
    if (!(business_start_hour > 0 && business_start_hour < business_end_hour && business_end_hour < 24)) {
        throw error(error_code::invalid_argument, "business hours must satisfy 0 < start < end < 24");
    }
    if (!(am_pm_boundary_hour > 0 && am_pm_boundary_hour < 24)) {
        throw error(error_code::invalid_argument, "am/pm boundary must lie strictly inside the day");
    }
}

auto extraction_model::from_config(const config& cfg) -> extraction_model {
    extraction_model m;
    m.business_hours_rate = cfg.get_double("extraction.business_hours_rate", m.business_hours_rate);
    m.off_hours_rate = cfg.get_double("extraction.off_hours_rate", m.off_hours_rate);
    m.business_start_hour = cfg.get_double("extraction.business_start_hour", m.business_start_hour);
    m.business_end_hour = cfg.get_double("extraction.business_end_hour", m.business_end_hour);
    m.transfer_rate_am = cfg.get_double("transfer.rate_am", m.transfer_rate_am);
    m.transfer_rate_pm = cfg.get_double("transfer.rate_pm", m.transfer_rate_pm);
    m.am_pm_boundary_hour = cfg.get_double("transfer.am_pm_boundary_hour", m.am_pm_boundary_hour);
    m.validate();
    return m;
}

auto simulate_extraction(std::span<const std::string> accessions, const extraction_model& model, virtual_clock& clock)
    -> double {
    model.validate();
    const double open = model.business_start_hour * seconds_per_hour;
    const double close = model.business_end_hour * seconds_per_hour;
    const std::array<double, 2> boundaries{open, close};
    const double done = clock.now() + integrate_duration(
        clock.now(), static_cast<double>(accessions.size()), boundaries, [&](double tod) {
            const bool business = tod >= open && tod < close;
            return (business ? model.business_hours_rate : model.off_hours_rate) / seconds_per_hour;
        });
    clock.advance_to(done);
    clock.record("extracted " + std::to_string(accessions.size()) + " accessions");
    return done;
}

auto transfer_seconds(std::uint64_t bytes, const extraction_model& model, double bandwidth_cap, double start)
    -> double {
    model.validate();
    if (bandwidth_cap < 0) throw error(error_code::invalid_argument, "bandwidth cap must not be negative");
    const double cap = bandwidth_cap > 0 ? bandwidth_cap : std::numeric_limits<double>::infinity();
    const double boundary = model.am_pm_boundary_hour * seconds_per_hour;
    const std::array<double, 1> boundaries{boundary};
    return integrate_duration(start, static_cast<double>(bytes), boundaries, [&](double tod) {
        return std::min(tod < boundary ? model.transfer_rate_am : model.transfer_rate_pm, cap);
    });
}

}  // namespace vision::synth
