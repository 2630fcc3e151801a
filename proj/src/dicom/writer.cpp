/**
 * @file writer.cpp
 */

#include "vision/dicom/writer.hpp"

#include "vision/common/error.hpp"
#include "vision/dicom/parser.hpp"

namespace vision::dicom {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

void validate(std::span<const data_element> elements) {
    const data_element* previous = nullptr;
    for (const auto& e : elements) {
        const auto name = e.tag.to_string();
        if (previous != nullptr && !(previous->tag < e.tag)) {
            throw error(error_code::invalid_argument, "out-of-order tag " + name);
        }
        if (!is_known_vr(e.vr)) throw error(error_code::invalid_argument, "unknown VR '" + e.vr + "' on " + name);
        if (e.length != e.value.size()) {
            throw error(error_code::invalid_argument, "length field disagrees with value size on " + name);
        }
        if (e.value.size() % 2 != 0) throw error(error_code::invalid_argument, "odd-length unpadded value on " + name);
        if (!has_long_length(e.vr) && e.value.size() > 0xFFFF) {
            throw error(error_code::invalid_argument, "value too long for short-length VR on " + name);
        }
        if ((e.vr == "US" && e.value.size() % 2 != 0) || (e.vr == "UL" && e.value.size() % 4 != 0)) {
            throw error(error_code::invalid_argument, "binary value size invalid for " + e.vr + " on " + name);
        }
        previous = &e;
    }
}

void encode(std::vector<std::uint8_t>& out, const data_element& e, bool implicit) {
    put_u16(out, e.tag.group);
    put_u16(out, e.tag.element);
    if (implicit && e.tag.group != 0x0002) {
        put_u32(out, e.length);
    } else {
        out.push_back(static_cast<std::uint8_t>(e.vr[0]));
        out.push_back(static_cast<std::uint8_t>(e.vr[1]));
        if (has_long_length(e.vr)) {
            put_u16(out, 0);
            put_u32(out, e.length);
        } else {
            put_u16(out, static_cast<std::uint16_t>(e.length));
        }
    }
    out.insert(out.end(), e.value.begin(), e.value.end());
}

}  // namespace

auto write_file(std::span<const data_element> elements, const write_options& options) -> std::vector<std::uint8_t> {
    validate(elements);
    std::vector<std::uint8_t> out;
    std::size_t estimate = prefix_size;
    for (const auto& e : elements) estimate += 12 + e.value.size();
    out.reserve(estimate);
    if (!options.omit_magic) {
        out.resize(preamble_size, 0);
        out.insert(out.end(), {'D', 'I', 'C', 'M'});
    }
    for (const auto& e : elements) encode(out, e, options.implicit_vr);
    if (options.truncate_at && *options.truncate_at < out.size()) out.resize(*options.truncate_at);
    return out;
}

auto element_offsets(std::span<const data_element> elements, const write_options& options)
    -> std::vector<std::size_t> {
    std::vector<std::size_t> offsets;
    std::size_t pos = options.omit_magic ? 0 : prefix_size;
    for (const auto& e : elements) {
        offsets.push_back(pos);
        const bool implicit = options.implicit_vr && e.tag.group != 0x0002;
        pos += (implicit || !has_long_length(e.vr) ? 8 : 12) + e.value.size();
    }
    return offsets;
}

}  // namespace vision::dicom
