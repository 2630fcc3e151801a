/**
 * @file element.hpp
 * @brief DICOM tags, value representations and data elements
 */

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vision::dicom {

struct tag {
    std::uint16_t group{};
    std::uint16_t element{};

    constexpr auto operator<=>(const tag&) const = default;

    /// "(GGGG,EEEE)" with uppercase hex digits.
    [[nodiscard]] auto to_string() const -> std::string;
};

namespace tags {

inline constexpr tag file_meta_group_length{0x0002, 0x0000};
inline constexpr tag media_storage_sop_class_uid{0x0002, 0x0002};
inline constexpr tag media_storage_sop_instance_uid{0x0002, 0x0003};
inline constexpr tag transfer_syntax_uid{0x0002, 0x0010};

inline constexpr tag image_type{0x0008, 0x0008};
inline constexpr tag sop_class_uid{0x0008, 0x0016};
inline constexpr tag sop_instance_uid{0x0008, 0x0018};
inline constexpr tag study_date{0x0008, 0x0020};
inline constexpr tag accession_number{0x0008, 0x0050};
inline constexpr tag modality{0x0008, 0x0060};
inline constexpr tag manufacturer{0x0008, 0x0070};
inline constexpr tag study_description{0x0008, 0x1030};
inline constexpr tag patient_id{0x0010, 0x0020};
inline constexpr tag kvp{0x0018, 0x0060};
inline constexpr tag software_versions{0x0018, 0x1020};
inline constexpr tag exposure_time{0x0018, 0x1150};
inline constexpr tag view_position{0x0018, 0x5101};
inline constexpr tag study_instance_uid{0x0020, 0x000D};
inline constexpr tag series_instance_uid{0x0020, 0x000E};
inline constexpr tag rows{0x0028, 0x0010};
inline constexpr tag columns{0x0028, 0x0011};
inline constexpr tag pixel_data{0x7FE0, 0x0010};

inline constexpr tag item{0xFFFE, 0xE000};
inline constexpr tag item_delimitation{0xFFFE, 0xE00D};
inline constexpr tag sequence_delimitation{0xFFFE, 0xE0DD};

}  // namespace tags

inline constexpr std::uint32_t undefined_length = 0xFFFFFFFFu;

inline constexpr std::string_view explicit_vr_little_endian = "1.2.840.10008.1.2.1";
inline constexpr std::string_view implicit_vr_little_endian = "1.2.840.10008.1.2";
inline constexpr std::string_view explicit_vr_big_endian = "1.2.840.10008.1.2.2";

/// Any VR code defined by the standard.
[[nodiscard]] auto is_known_vr(std::string_view vr) -> bool;

/// VRs encoded with a 2-byte reserved field and 32-bit length in explicit VR.
[[nodiscard]] auto has_long_length(std::string_view vr) -> bool;

/// VRs whose values the parser retains; everything else is skipped by length.
[[nodiscard]] auto is_retained_vr(std::string_view vr) -> bool;

/// Text VRs from the retained set (everything retained except US and UL).
[[nodiscard]] auto is_text_vr(std::string_view vr) -> bool;

struct data_element {
    dicom::tag tag;
    std::string vr;  ///< "UN" for elements read in implicit VR
    std::uint32_t length{};
    std::vector<std::uint8_t> value;

    bool operator==(const data_element&) const = default;

    /// Value as text with trailing space/NUL padding removed.
    [[nodiscard]] auto as_string() const -> std::string;
};

/// Builds a text element, padding to even length (NUL for UI, space otherwise).
[[nodiscard]] auto make_text(tag t, std::string_view vr, std::string_view text) -> data_element;
[[nodiscard]] auto make_us(tag t, std::uint16_t value) -> data_element;
[[nodiscard]] auto make_ul(tag t, std::uint32_t value) -> data_element;
[[nodiscard]] auto make_ob(tag t, std::vector<std::uint8_t> bytes) -> data_element;

}  // namespace vision::dicom
