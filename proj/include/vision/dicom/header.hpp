/**
 * @file header.hpp
 * @brief Selected header elements extracted per scanned file
 */

#pragma once

#include "vision/dicom/parser.hpp"

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace vision::dicom {

struct header_record {
    std::string accession_number;
    std::string patient_id;
    std::string study_uid;
    std::string series_uid;
    std::string sop_uid;
    std::string study_date;
    std::string modality;
    std::string manufacturer;
    std::string software_versions;
    std::optional<std::string> kvp;
    std::optional<std::string> exposure_time;
    std::optional<std::uint32_t> rows;
    std::optional<std::uint32_t> columns;
    std::string procedure_description;
    std::string image_type;
    std::string view_position;
    std::string file_path;  ///< relative, forward slashes
    std::uint64_t file_size{};
    scan_status parse_status{scan_status::corrupt};

    bool operator==(const header_record&) const = default;
};

/**
 * @brief Maps the selected tags into a header_record.
 *
 * Elements are decoded by tag, so implicit-VR ("UN") input works too.
 * Missing elements stay empty. Throws vision::error(invalid_argument) for a
 * CORRUPT outcome.
 */
[[nodiscard]] auto extract_header(const scan_outcome& outcome, std::string file_path, std::uint64_t file_size)
    -> header_record;

/// Scan result for one on-disk file; `header` carries path/size even when corrupt.
struct file_scan {
    header_record header;
    std::optional<std::string> error_detail;
};

/**
 * Reads and classifies one file. Only a bounded prefix is read unless the
 * header runs past it. I/O errors propagate as vision::error(io_error).
 */
[[nodiscard]] auto scan_path(const std::filesystem::path& path, std::string relative_path) -> file_scan;

void to_json(nlohmann::json& j, const header_record& h);
void from_json(const nlohmann::json& j, header_record& h);
void to_json(nlohmann::json& j, const file_scan& s);
void from_json(const nlohmann::json& j, file_scan& s);

}  // namespace vision::dicom
