/**
 * @file timestamp.hpp
 * @brief UTC timestamp formatting and injectable clocks
 */

#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace vision {

/// Formats seconds since the Unix epoch as "YYYY-MM-DDTHH:MM:SSZ".
[[nodiscard]] auto format_utc(std::int64_t epoch_seconds) -> std::string;

/// Parses the format produced by format_utc; throws vision::error on mismatch.
[[nodiscard]] auto parse_utc(const std::string& text) -> std::int64_t;

[[nodiscard]] auto now_utc() -> std::string;

/// Source of "now" for records that must be reproducible in tests.
using timestamp_source = std::function<std::string()>;

[[nodiscard]] auto fixed_timestamp(std::string value) -> timestamp_source;

}  // namespace vision
