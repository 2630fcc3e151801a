/**
 * @file header.cpp
 */

#include "vision/dicom/header.hpp"

#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"

#include <charconv>

namespace vision::dicom {

namespace {

constexpr std::size_t scan_prefix_bytes = 64 * 1024;

auto trim(std::string s) -> std::string {
    const auto first = s.find_first_not_of(" \0", 0, 2);
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \0", std::string::npos, 2);
    return s.substr(first, last - first + 1);
}

auto text_of(const scan_outcome& o, tag t) -> std::string {
    const auto* e = o.find(t);
    return e == nullptr ? std::string{} : trim(e->as_string());
}

auto optional_text(const scan_outcome& o, tag t) -> std::optional<std::string> {
    const auto* e = o.find(t);
    if (e == nullptr) return std::nullopt;
    auto text = trim(e->as_string());
    if (text.empty()) return std::nullopt;
    return text;
}

// US in either explicit or implicit form; tolerate an IS-style text value.
auto optional_unsigned(const scan_outcome& o, tag t) -> std::optional<std::uint32_t> {
    const auto* e = o.find(t);
    if (e == nullptr) return std::nullopt;
    if ((e->vr == "US" || e->vr == "UN") && e->value.size() == 2) {
        return static_cast<std::uint32_t>(e->value[0] | (e->value[1] << 8));
    }
    if (e->vr == "UL" && e->value.size() == 4) {
        return static_cast<std::uint32_t>(e->value[0]) | (static_cast<std::uint32_t>(e->value[1]) << 8) |
               (static_cast<std::uint32_t>(e->value[2]) << 16) | (static_cast<std::uint32_t>(e->value[3]) << 24);
    }
    const auto text = trim(e->as_string());
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

}  // namespace

auto extract_header(const scan_outcome& outcome, std::string file_path, std::uint64_t file_size) -> header_record {
    if (outcome.status == scan_status::corrupt) {
        throw error(error_code::invalid_argument, "cannot extract header from CORRUPT scan of " + file_path);
    }
    header_record h;
    h.accession_number = text_of(outcome, tags::accession_number);
    h.patient_id = text_of(outcome, tags::patient_id);
    h.study_uid = text_of(outcome, tags::study_instance_uid);
    h.series_uid = text_of(outcome, tags::series_instance_uid);
    h.sop_uid = text_of(outcome, tags::sop_instance_uid);
    h.study_date = text_of(outcome, tags::study_date);
    h.modality = text_of(outcome, tags::modality);
    h.manufacturer = text_of(outcome, tags::manufacturer);
    h.software_versions = text_of(outcome, tags::software_versions);
    h.kvp = optional_text(outcome, tags::kvp);
    h.exposure_time = optional_text(outcome, tags::exposure_time);
    h.rows = optional_unsigned(outcome, tags::rows);
    h.columns = optional_unsigned(outcome, tags::columns);
    h.procedure_description = text_of(outcome, tags::study_description);
    h.image_type = text_of(outcome, tags::image_type);
    h.view_position = text_of(outcome, tags::view_position);
    h.file_path = std::move(file_path);
    h.file_size = file_size;
    h.parse_status = outcome.status;
    return h;
}

auto scan_path(const std::filesystem::path& path, std::string relative_path) -> file_scan {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw error(error_code::io_error, "cannot stat " + path.string() + ": " + ec.message());

    std::optional<scan_outcome> outcome;
    if (size > scan_prefix_bytes) {
        const auto prefix = read_prefix(path, scan_prefix_bytes);
        outcome = parse_prefix(prefix, size);
    }
    if (!outcome) outcome = parse_file(read_bytes(path));

    file_scan result;
    if (outcome->status == scan_status::corrupt) {
        result.header.file_path = std::move(relative_path);
        result.header.file_size = size;
        result.header.parse_status = scan_status::corrupt;
        result.error_detail = outcome->error_detail;
    } else {
        result.header = extract_header(*outcome, std::move(relative_path), size);
    }
    return result;
}

namespace {

template <typename T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
    if (v) {
        j[key] = *v;
    } else {
        j[key] = nullptr;
    }
}

template <typename T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
    if (!j.contains(key) || j.at(key).is_null()) {
        v.reset();
    } else {
        v = j.at(key).get<T>();
    }
}

}  // namespace

void to_json(nlohmann::json& j, const header_record& h) {
    j = nlohmann::json{{"accession_number", h.accession_number},
                       {"patient_id", h.patient_id},
                       {"study_uid", h.study_uid},
                       {"series_uid", h.series_uid},
                       {"sop_uid", h.sop_uid},
                       {"study_date", h.study_date},
                       {"modality", h.modality},
                       {"manufacturer", h.manufacturer},
                       {"software_versions", h.software_versions},
                       {"procedure_description", h.procedure_description},
                       {"image_type", h.image_type},
                       {"view_position", h.view_position},
                       {"file_path", h.file_path},
                       {"file_size", h.file_size},
                       {"parse_status", std::string(to_string(h.parse_status))}};
    put_optional(j, "kvp", h.kvp);
    put_optional(j, "exposure_time", h.exposure_time);
    put_optional(j, "rows", h.rows);
    put_optional(j, "columns", h.columns);
}

void from_json(const nlohmann::json& j, header_record& h) {
    j.at("accession_number").get_to(h.accession_number);
    j.at("patient_id").get_to(h.patient_id);
    j.at("study_uid").get_to(h.study_uid);
    j.at("series_uid").get_to(h.series_uid);
    j.at("sop_uid").get_to(h.sop_uid);
    j.at("study_date").get_to(h.study_date);
    j.at("modality").get_to(h.modality);
    j.at("manufacturer").get_to(h.manufacturer);
    j.at("software_versions").get_to(h.software_versions);
    j.at("procedure_description").get_to(h.procedure_description);
    j.at("image_type").get_to(h.image_type);
    j.at("view_position").get_to(h.view_position);
    j.at("file_path").get_to(h.file_path);
    j.at("file_size").get_to(h.file_size);
    const auto status = parse_scan_status(j.at("parse_status").get<std::string>());
    if (!status) throw error(error_code::invalid_argument, "unknown parse_status");
    h.parse_status = *status;
    get_optional(j, "kvp", h.kvp);
    get_optional(j, "exposure_time", h.exposure_time);
    get_optional(j, "rows", h.rows);
    get_optional(j, "columns", h.columns);
}

void to_json(nlohmann::json& j, const file_scan& s) {
    j = nlohmann::json{{"header", s.header}};
    put_optional(j, "error_detail", s.error_detail);
}

void from_json(const nlohmann::json& j, file_scan& s) {
    j.at("header").get_to(s.header);
    get_optional(j, "error_detail", s.error_detail);
}

}  // namespace vision::dicom
