/**
 * @file writer.hpp
 * @brief Byte-exact DICOM stream writer used by the synthetic generator
 */

#pragma once

#include "vision/dicom/element.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vision::dicom {

struct write_options {
    bool omit_magic{false};                  ///< drop preamble + "DICM"
    std::optional<std::size_t> truncate_at;  ///< cut the final output at this offset
    bool implicit_vr{false};                 ///< data set (not group 0002) in implicit VR
};

/**
 * @brief Encodes elements as preamble + "DICM" + explicit VR little endian.
 *
 * Elements are written verbatim; no file meta group is synthesized. Throws
 * vision::error(invalid_argument) for out-of-order tags, odd-length values,
 * a length field that disagrees with the value, or an unknown VR.
 */
[[nodiscard]] auto write_file(std::span<const data_element> elements, const write_options& options = {})
    -> std::vector<std::uint8_t>;

/// Byte offset at which each element's header starts in write_file output.
[[nodiscard]] auto element_offsets(std::span<const data_element> elements, const write_options& options = {})
    -> std::vector<std::size_t>;

}  // namespace vision::dicom
