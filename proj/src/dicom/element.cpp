/**
 * @file element.cpp
 */

#include "vision/dicom/element.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace vision::dicom {

namespace {

constexpr std::array<std::string_view, 34> known_vrs = {
    "AE", "AS", "AT", "CS", "DA", "DS", "DT", "FD", "FL", "IS", "LO", "LT",
    "OB", "OD", "OF", "OL", "OV", "OW", "PN", "SH", "SL", "SQ", "SS", "ST",
    "SV", "TM", "UC", "UI", "UL", "UN", "UR", "US", "UT", "UV"};

constexpr std::array<std::string_view, 13> long_vrs = {
    "OB", "OD", "OF", "OL", "OV", "OW", "SQ", "SV", "UC", "UN", "UR", "UT", "UV"};

constexpr std::array<std::string_view, 15> retained_vrs = {
    "AE", "AS", "CS", "DA", "DS", "IS", "LO", "LT", "PN", "SH", "ST", "TM", "UI", "US", "UL"};

template <std::size_t N>
auto contains(const std::array<std::string_view, N>& set, std::string_view vr) -> bool {
    return std::find(set.begin(), set.end(), vr) != set.end();
}

}  // namespace

auto tag::to_string() const -> std::string {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "(%04X,%04X)", group, element);
    return buf;
}

auto is_known_vr(std::string_view vr) -> bool { return contains(known_vrs, vr); }
auto has_long_length(std::string_view vr) -> bool { return contains(long_vrs, vr); }
auto is_retained_vr(std::string_view vr) -> bool { return contains(retained_vrs, vr); }
auto is_text_vr(std::string_view vr) -> bool {
    return is_retained_vr(vr) && vr != "US" && vr != "UL";
}

auto data_element::as_string() const -> std::string {
    std::string text(value.begin(), value.end());
    while (!text.empty() && (text.back() == ' ' || text.back() == '\0')) text.pop_back();
    return text;
}

auto make_text(tag t, std::string_view vr, std::string_view text) -> data_element {
    data_element e{t, std::string(vr), 0, {text.begin(), text.end()}};
    if (e.value.size() % 2 != 0) e.value.push_back(vr == "UI" ? '\0' : ' ');
    e.length = static_cast<std::uint32_t>(e.value.size());
    return e;
}

auto make_us(tag t, std::uint16_t value) -> data_element {
    return {t, "US", 2, {static_cast<std::uint8_t>(value & 0xFF), static_cast<std::uint8_t>(value >> 8)}};
}

auto make_ul(tag t, std::uint32_t value) -> data_element {
    return {t, "UL", 4,
            {static_cast<std::uint8_t>(value & 0xFF), static_cast<std::uint8_t>((value >> 8) & 0xFF),
             static_cast<std::uint8_t>((value >> 16) & 0xFF), static_cast<std::uint8_t>(value >> 24)}};
}

auto make_ob(tag t, std::vector<std::uint8_t> bytes) -> data_element {
    if (bytes.size() % 2 != 0) bytes.push_back(0);
    const auto len = static_cast<std::uint32_t>(bytes.size());
    return {t, "OB", len, std::move(bytes)};
}

}  // namespace vision::dicom
