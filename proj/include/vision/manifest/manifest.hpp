/**
 * @file manifest.hpp
 * @brief The per-batch study/file manifest pair
 *
 * Both files start with the line `#vision-manifest v1` followed by one
 * TAB-separated row per record, LF line endings:
 *
 *     studies.manifest.tsv: accession_number  study_uid  modality  expected_file_count
 *     files.manifest.tsv:   path  sop_uid  accession_number  size  digest
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vision::manifest {

struct study_row {
    std::string accession_number;
    std::string study_uid;
    std::string modality;
    std::uint64_t expected_file_count{};

    bool operator==(const study_row&) const = default;
};

struct file_row {
    std::string path;
    std::string sop_uid;
    std::string accession_number;
    std::uint64_t size{};
    std::string digest;

    bool operator==(const file_row&) const = default;
};

struct batch_manifest_pair {
    std::vector<study_row> studies;
    std::vector<file_row> files;

    bool operator==(const batch_manifest_pair&) const = default;

    [[nodiscard]] auto expected_file_total() const -> std::uint64_t;
};

/**
 * @brief Parses and validates both manifests.
 *
 * Throws vision::error(manifest_invalid) naming the file and line for
 * malformed rows, or the accession / SOP UID that breaks a pair invariant.
 */
[[nodiscard]] auto parse_manifests(std::string_view study_text, std::string_view file_text) -> batch_manifest_pair;

[[nodiscard]] auto serialize_studies(const batch_manifest_pair& pair) -> std::string;
[[nodiscard]] auto serialize_files(const batch_manifest_pair& pair) -> std::string;

void save_manifests(const batch_manifest_pair& pair, const std::filesystem::path& root);

/// nullopt when neither file exists; one without the other is manifest_invalid.
[[nodiscard]] auto load_manifests(const std::filesystem::path& root) -> std::optional<batch_manifest_pair>;

}  // namespace vision::manifest
