/**
 * @file parser.cpp
 * @brief Header-level DICOM parser
 */

#include "vision/dicom/parser.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace vision::dicom {

namespace {

constexpr int max_sequence_depth = 32;

struct parse_failure {
    std::string detail;
};

/// Thrown when the prefix buffer ends inside the header but the file does not.
struct need_more_bytes {};

enum class vr_mode { explicit_vr, implicit_vr };

class stream_reader {
public:
    stream_reader(std::span<const std::uint8_t> data, std::uint64_t total_size)
        : data_(data), total_size_(total_size) {}

    [[nodiscard]] auto available(std::size_t pos) const -> std::uint64_t {
        return pos >= data_.size() ? 0 : data_.size() - pos;
    }

    [[nodiscard]] auto at_end(std::size_t pos) const -> bool { return pos >= total_size_; }

    void require(std::size_t pos, std::uint64_t count, const char* what) const {
        if (pos + count <= data_.size()) return;
        if (pos + count <= total_size_) throw need_more_bytes{};
        throw parse_failure{std::string("truncated ") + what + " at offset " + std::to_string(pos)};
    }

    [[nodiscard]] auto u16(std::size_t pos) const -> std::uint16_t {
        return static_cast<std::uint16_t>(data_[pos] | (data_[pos + 1] << 8));
    }

    [[nodiscard]] auto u32(std::size_t pos) const -> std::uint32_t {
        return static_cast<std::uint32_t>(data_[pos]) | (static_cast<std::uint32_t>(data_[pos + 1]) << 8) |
               (static_cast<std::uint32_t>(data_[pos + 2]) << 16) |
               (static_cast<std::uint32_t>(data_[pos + 3]) << 24);
    }

    [[nodiscard]] auto vr_at(std::size_t pos) const -> std::string {
        return {static_cast<char>(data_[pos]), static_cast<char>(data_[pos + 1])};
    }

    [[nodiscard]] auto slice(std::size_t pos, std::size_t len) const -> std::vector<std::uint8_t> {
        return {data_.begin() + static_cast<std::ptrdiff_t>(pos),
                data_.begin() + static_cast<std::ptrdiff_t>(pos + len)};
    }

    [[nodiscard]] auto total_size() const -> std::uint64_t { return total_size_; }

    /// bytes 4..5 of the element at pos spell a VR code
    [[nodiscard]] auto looks_explicit(std::size_t pos) const -> bool {
        if (pos + 6 > data_.size()) return false;
        return is_known_vr(vr_at(pos + 4));
    }

private:
    std::span<const std::uint8_t> data_;
    std::uint64_t total_size_;
};

struct element_header {
    tag t;
    std::string vr;
    std::uint32_t length{};
    std::size_t value_offset{};
};

class stream_parser {
public:
    explicit stream_parser(const stream_reader& reader) : in_(reader) {}

    /**
     * Reads an optional group 0002 block (always explicit VR) and then the
     * data set. Without a Transfer Syntax UID the data-set encoding is
     * `forced` if given, else guessed from the first data-set element.
     */
    auto run(std::size_t pos, std::optional<vr_mode> forced) -> scan_outcome {
        scan_outcome out;
        std::optional<tag> previous;

        while (!in_.at_end(pos)) {
            in_.require(pos, 4, "element header");
            if (in_.u16(pos) != 0x0002) break;
            auto h = read_header(pos, vr_mode::explicit_vr);
            check_order(previous, h.t);
            pos = consume(h, vr_mode::explicit_vr, out.elements);
        }

        vr_mode mode = forced.value_or(in_.looks_explicit(pos) ? vr_mode::explicit_vr : vr_mode::implicit_vr);
        if (const auto* ts = find_in(out.elements, tags::transfer_syntax_uid)) {
            const auto uid = ts->as_string();
            if (uid == explicit_vr_big_endian) {
                throw parse_failure{"unsupported transfer syntax " + uid};
            }
            mode = uid == implicit_vr_little_endian ? vr_mode::implicit_vr : vr_mode::explicit_vr;
        }
        chosen_mode = mode;

        while (!in_.at_end(pos)) {
            auto h = read_header(pos, mode);
            check_order(previous, h.t);
            if (h.t == tags::pixel_data) {
                if (h.length != undefined_length && h.value_offset + h.length > in_.total_size()) {
                    throw parse_failure{h.t.to_string() + " length " + std::to_string(h.length) +
                                        " exceeds remaining " +
                                        std::to_string(in_.total_size() - h.value_offset) + " bytes"};
                }
                out.stop = stop_reason::pixel_data_reached;
                return out;
            }
            pos = consume(h, mode, out.elements);
        }
        out.stop = stop_reason::end_of_file;
        return out;
    }

private:
    static auto find_in(const std::vector<data_element>& elements, tag t) -> const data_element* {
        for (const auto& e : elements) {
            if (e.tag == t) return &e;
        }
        return nullptr;
    }

    static void check_order(std::optional<tag>& previous, tag current) {
        if (previous && !(*previous < current)) {
            throw parse_failure{"out-of-order tag " + current.to_string() + " after " + previous->to_string()};
        }
        previous = current;
    }

    auto read_header(std::size_t pos, vr_mode mode) const -> element_header {
        element_header h;
        in_.require(pos, 8, "element header");
        h.t = tag{in_.u16(pos), in_.u16(pos + 2)};
        if (mode == vr_mode::implicit_vr || h.t.group == 0xFFFE) {
            h.vr = "UN";
            h.length = in_.u32(pos + 4);
            h.value_offset = pos + 8;
            return h;
        }
        h.vr = in_.vr_at(pos + 4);
        if (!is_known_vr(h.vr)) {
            throw parse_failure{"invalid VR for " + h.t.to_string() + " at offset " + std::to_string(pos)};
        }
        if (has_long_length(h.vr)) {
            in_.require(pos, 12, "element header");
            h.length = in_.u32(pos + 8);
            h.value_offset = pos + 12;
        } else {
            h.length = in_.u16(pos + 6);
            h.value_offset = pos + 8;
        }
        return h;
    }

    auto consume(const element_header& h, vr_mode mode, std::vector<data_element>& out) -> std::size_t {
        if (h.t.group == 0xFFFE) {
            throw parse_failure{"unexpected delimiter " + h.t.to_string() + " outside a sequence"};
        }
        if (h.length == undefined_length) {
            if (h.vr != "SQ" && h.vr != "UN" && h.vr != "OB" && h.vr != "OW") {
                throw parse_failure{"undefined length on " + h.vr + " element " + h.t.to_string()};
            }
            return skip_undefined_sequence(h.value_offset, mode, 0);
        }
        if (h.length % 2 != 0) {
            throw parse_failure{"odd length " + std::to_string(h.length) + " on " + h.t.to_string()};
        }
        if (h.value_offset + static_cast<std::uint64_t>(h.length) > in_.total_size()) {
            throw parse_failure{h.t.to_string() + " length " + std::to_string(h.length) + " exceeds remaining " +
                                std::to_string(in_.total_size() - std::min<std::uint64_t>(
                                                                      h.value_offset, in_.total_size())) +
                                " bytes"};
        }
        const bool keep = h.vr == "UN" ? mode == vr_mode::implicit_vr : is_retained_vr(h.vr);
        if (keep) {
            in_.require(h.value_offset, h.length, "element value");
            out.push_back(data_element{h.t, h.vr, h.length, in_.slice(h.value_offset, h.length)});
        }
        return h.value_offset + h.length;
    }

    // Walks items until the sequence delimitation item; contents are discarded.
    auto skip_undefined_sequence(std::size_t pos, vr_mode mode, int depth) -> std::size_t {
        if (depth > max_sequence_depth) throw parse_failure{"sequence nesting too deep"};
        for (;;) {
            in_.require(pos, 8, "sequence item");
            const tag t{in_.u16(pos), in_.u16(pos + 2)};
            const auto len = in_.u32(pos + 4);
            if (t == tags::sequence_delimitation) return pos + 8;
            if (t != tags::item) throw parse_failure{"expected item tag, found " + t.to_string()};
            if (len == undefined_length) {
                pos = skip_undefined_item(pos + 8, mode, depth + 1);
            } else {
                if (pos + 8 + static_cast<std::uint64_t>(len) > in_.total_size()) {
                    throw parse_failure{"item length exceeds file at offset " + std::to_string(pos)};
                }
                pos += 8 + len;
            }
        }
    }

    auto skip_undefined_item(std::size_t pos, vr_mode mode, int depth) -> std::size_t {
        if (depth > max_sequence_depth) throw parse_failure{"sequence nesting too deep"};
        for (;;) {
            in_.require(pos, 8, "item element");
            const tag t{in_.u16(pos), in_.u16(pos + 2)};
            if (t == tags::item_delimitation) return pos + 8;
            auto h = read_header(pos, mode);
            if (h.length == undefined_length) {
                pos = skip_undefined_sequence(h.value_offset, mode, depth + 1);
            } else {
                if (h.value_offset + static_cast<std::uint64_t>(h.length) > in_.total_size()) {
                    throw parse_failure{h.t.to_string() + " length exceeds file inside sequence"};
                }
                pos = h.value_offset + h.length;
            }
        }
    }

    const stream_reader& in_;

public:
    std::optional<vr_mode> chosen_mode;
};

auto has_magic(std::span<const std::uint8_t> bytes) -> bool {
    return bytes.size() >= prefix_size && std::memcmp(bytes.data() + magic_offset, "DICM", 4) == 0;
}

auto corrupt(std::string detail) -> scan_outcome {
    scan_outcome out;
    out.status = scan_status::corrupt;
    out.stop = stop_reason::parse_error;
    out.error_detail = std::move(detail);
    return out;
}

auto parse_impl(std::span<const std::uint8_t> bytes, std::uint64_t total_size) -> scan_outcome {
    if (total_size == 0) return corrupt("empty input");
    const stream_reader reader(bytes, total_size);

    if (has_magic(bytes)) {
        try {
            auto out = stream_parser(reader).run(prefix_size, std::nullopt);
            out.status = scan_status::modern;
            return out;
        } catch (const parse_failure& f) {
            return corrupt(f.detail);
        }
    }

    // Force-read: the heuristic's choice first, then the other encoding.
    std::string first_detail;
    std::optional<vr_mode> retry;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1 && !retry) break;
        stream_parser parser(reader);
        try {
            auto out = parser.run(0, attempt == 0 ? std::nullopt : retry);
            if (attempt == 0 && parser.chosen_mode) {
                retry = *parser.chosen_mode == vr_mode::explicit_vr ? vr_mode::implicit_vr : vr_mode::explicit_vr;
            }
            if (out.elements.empty()) {
                if (first_detail.empty()) first_detail = "no elements recovered";
                continue;
            }
            out.status = scan_status::legacy;
            return out;
        } catch (const parse_failure& f) {
            if (first_detail.empty()) first_detail = f.detail;
            if (attempt == 0 && parser.chosen_mode) {
                retry = *parser.chosen_mode == vr_mode::explicit_vr ? vr_mode::implicit_vr : vr_mode::explicit_vr;
            }
        }
    }
    return corrupt("no DICM magic and force-read failed: " + first_detail);
}

}  // namespace

auto to_string(scan_status s) -> std::string_view {
    switch (s) {
        case scan_status::modern: return "MODERN";
        case scan_status::legacy: return "LEGACY";
        case scan_status::corrupt: return "CORRUPT";
    }
    return "CORRUPT";
}

auto to_string(stop_reason r) -> std::string_view {
    switch (r) {
        case stop_reason::pixel_data_reached: return "PIXEL_DATA_REACHED";
        case stop_reason::end_of_file: return "END_OF_FILE";
        case stop_reason::parse_error: return "PARSE_ERROR";
    }
    return "PARSE_ERROR";
}

auto parse_scan_status(std::string_view text) -> std::optional<scan_status> {
    if (text == "MODERN") return scan_status::modern;
    if (text == "LEGACY") return scan_status::legacy;
    if (text == "CORRUPT") return scan_status::corrupt;
    return std::nullopt;
}

auto scan_outcome::find(tag t) const -> const data_element* {
    const auto it = std::lower_bound(elements.begin(), elements.end(), t,
                                     [](const data_element& e, tag v) { return e.tag < v; });
    return it != elements.end() && it->tag == t ? &*it : nullptr;
}

auto parse_file(std::span<const std::uint8_t> bytes) noexcept -> scan_outcome {
    try {
        return parse_impl(bytes, bytes.size());
    } catch (const need_more_bytes&) {
        return corrupt("internal: buffer underrun");
    } catch (const std::exception& e) {
        return corrupt(e.what());
    } catch (...) {
        return corrupt("unknown parser failure");
    }
}

auto parse_prefix(std::span<const std::uint8_t> prefix, std::uint64_t total_size) noexcept
    -> std::optional<scan_outcome> {
    try {
        return parse_impl(prefix, total_size);
    } catch (const need_more_bytes&) {
        return std::nullopt;
    } catch (const std::exception& e) {
        return corrupt(e.what());
    } catch (...) {
        return corrupt("unknown parser failure");
    }
}

}  // namespace vision::dicom
