/**
 * @file clinical.hpp
 * @brief Clinical snapshot rows (demographics and report text) keyed by accession
 *
 * Fixture format, TAB-separated with LF endings and an optional column line:
 *
 *     patient_id  accession_number  birth_year  sex  site_code  study_date  report_text
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vision::catalog {

struct demographics {
    std::uint32_t birth_year{};
    std::string sex;
    std::string site_code;

    bool operator==(const demographics&) const = default;
};

struct clinical_snapshot_row {
    std::string patient_id;
    std::string accession_number;
    catalog::demographics demographics;
    std::string study_date;
    std::string report_text;

    bool operator==(const clinical_snapshot_row&) const = default;
};

inline constexpr std::string_view clinical_columns =
    "patient_id\taccession_number\tbirth_year\tsex\tsite_code\tstudy_date\treport_text";

/// Throws vision::error(invalid_argument) on malformed rows or a repeated (patient_id, accession_number).
[[nodiscard]] auto parse_clinical_snapshot(std::string_view text) -> std::vector<clinical_snapshot_row>;
[[nodiscard]] auto serialize_clinical_snapshot(const std::vector<clinical_snapshot_row>& rows) -> std::string;

/// Missing file reads as an empty snapshot.
[[nodiscard]] auto load_clinical_snapshot(const std::filesystem::path& path) -> std::vector<clinical_snapshot_row>;
void save_clinical_snapshot(const std::vector<clinical_snapshot_row>& rows, const std::filesystem::path& path);

}  // namespace vision::catalog
