/**
 * @file profiler.hpp
 * @brief Per-batch quality reports and corpus statistics
 *
 * Both serialize as canonical JSON: `<batch>/_reports/<batch_id>.quality.json`
 * and `<landing>/_reports/corpus.json`.
 */

#pragma once

#include "vision/catalog/catalog.hpp"
#include "vision/dicom/header.hpp"
#include "vision/ingest/duplicates.hpp"
#include "vision/ingest/record.hpp"
#include "vision/manifest/reconcile.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vision::profiler {

/// Finding kinds in error_list.
namespace finding {
inline constexpr const char* parse_error = "PARSE_ERROR";
inline constexpr const char* legacy_header = "LEGACY_HEADER";
inline constexpr const char* manifest_absent = "MANIFEST_ABSENT";
inline constexpr const char* missing_file = "MISSING_FILE";
inline constexpr const char* unexpected_file = "UNEXPECTED_FILE";
inline constexpr const char* digest_mismatch = "DIGEST_MISMATCH";
inline constexpr const char* duplicate_sop_uid = "DUPLICATE_SOP_UID";
inline constexpr const char* duplicate_accession = "DUPLICATE_ACCESSION";
inline constexpr const char* accession_format = "ACCESSION_FORMAT";
inline constexpr const char* study_count_delta = "STUDY_COUNT_DELTA";
inline constexpr const char* cross_batch_duplicate = "CROSS_BATCH_DUPLICATE";
inline constexpr const char* orphan_image = "ORPHAN_IMAGE";
inline constexpr const char* orphan_row = "ORPHAN_ROW";
}  // namespace finding

struct quality_finding {
    std::string path;
    std::string kind;
    std::string detail;

    bool operator==(const quality_finding&) const = default;
};

struct files_per_study_summary {
    std::uint64_t min{};
    std::uint64_t max{};
    double mean{};

    bool operator==(const files_per_study_summary&) const = default;
};

struct quality_report {
    std::string batch_id;
    std::uint64_t file_count{};
    std::uint64_t study_count{};
    std::map<std::string, std::uint64_t> status_histogram;
    std::vector<quality_finding> error_list;
    std::uint64_t bytes_total{};
    files_per_study_summary files_per_study;

    bool operator==(const quality_report&) const = default;
};

/// Reports available when profiling; absent ones contribute no findings.
struct batch_reports {
    std::optional<manifest::reconciliation_report> reconciliation;
    std::optional<ingest::duplicate_report> duplicates;
    std::optional<catalog::link_report> link;
};

/**
 * @brief Aggregates one batch's scans and reports. Pure and deterministic.
 *
 * Corrupt files count as PARSE_ERROR only; they are not repeated as orphan images.
 */
[[nodiscard]] auto profile_batch(const ingest::batch_record& record, std::span<const dicom::file_scan> scans,
                                 const batch_reports& reports) -> quality_report;

inline const std::vector<std::string> corpus_dimensions{"link_status", "manufacturer", "modality", "parse_status",
                                                        "view_position"};

struct corpus_stats {
    /// dimension -> value -> catalog entries; an empty value counts under "(none)".
    std::map<std::string, std::map<std::string, std::uint64_t>> histograms;
    /// files in a study -> number of studies (catalog, corrupt entries excluded)
    std::map<std::uint64_t, std::uint64_t> files_per_study;
    std::map<std::string, std::uint64_t> bytes_per_batch;
    std::map<std::string, std::uint64_t> files_per_batch;
    std::map<std::string, std::uint64_t> batch_states;
    std::uint64_t catalog_entries{};
    std::uint64_t batch_count{};

    bool operator==(const corpus_stats&) const = default;
};

[[nodiscard]] auto profile_corpus(const catalog::catalog_view& view, std::span<const ingest::batch_record> records)
    -> corpus_stats;

void to_json(nlohmann::json& j, const quality_finding& f);
void from_json(const nlohmann::json& j, quality_finding& f);
void to_json(nlohmann::json& j, const quality_report& r);
void from_json(const nlohmann::json& j, quality_report& r);
void to_json(nlohmann::json& j, const corpus_stats& s);

[[nodiscard]] auto serialize(const quality_report& r) -> std::string;
[[nodiscard]] auto serialize(const corpus_stats& s) -> std::string;

}  // namespace vision::profiler
