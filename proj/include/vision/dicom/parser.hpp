/**
 * @file parser.hpp
 * @brief Header-level DICOM parsing with legacy force-read
 *
 * Files are classified as MODERN (preamble + "DICM" present and parsed),
 * LEGACY (magic absent but the stream parsed from offset 0) or CORRUPT.
 * Parsing stops at Pixel Data without touching its value, so scan cost does
 * not depend on image payload size.
 */

#pragma once

#include "vision/dicom/element.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vision::dicom {

inline constexpr std::size_t preamble_size = 128;
inline constexpr std::size_t magic_offset = 128;
inline constexpr std::size_t prefix_size = 132;

enum class scan_status { modern, legacy, corrupt };
enum class stop_reason { pixel_data_reached, end_of_file, parse_error };

[[nodiscard]] auto to_string(scan_status s) -> std::string_view;
[[nodiscard]] auto to_string(stop_reason r) -> std::string_view;
/// Accepts the upper-case names produced by to_string.
[[nodiscard]] auto parse_scan_status(std::string_view text) -> std::optional<scan_status>;

struct scan_outcome {
    scan_status status{scan_status::corrupt};
    std::vector<data_element> elements;  ///< empty iff status is corrupt
    stop_reason stop{stop_reason::parse_error};
    std::optional<std::string> error_detail;

    [[nodiscard]] auto find(tag t) const -> const data_element*;
};

/// Total: never throws, every failure becomes a CORRUPT outcome.
[[nodiscard]] auto parse_file(std::span<const std::uint8_t> bytes) noexcept -> scan_outcome;

/**
 * @brief Parses the leading part of a larger file.
 *
 * `total_size` is the size of the whole file; bounds checks against the end of
 * the file use it, so a Pixel Data length can be validated without the
 * payload. Returns nullopt when the header extends past `prefix`.
 */
[[nodiscard]] auto parse_prefix(std::span<const std::uint8_t> prefix,
                                std::uint64_t total_size) noexcept -> std::optional<scan_outcome>;

}  // namespace vision::dicom
