/**
 * @file layout.hpp
 * @brief Well-known file names inside batch roots and the landing zone
 */

#pragma once

#include <string_view>

namespace vision::layout {

inline constexpr std::string_view snapshot_file = "_integrity.snapshot.tsv";
inline constexpr std::string_view studies_manifest = "studies.manifest.tsv";
inline constexpr std::string_view files_manifest = "files.manifest.tsv";
inline constexpr std::string_view reports_dir = "_reports";
inline constexpr std::string_view catalog_log = "catalog.ndjson";
inline constexpr std::string_view catalog_index = "catalog.idx";
inline constexpr std::string_view lock_file = ".vision.lock";

/// Batch-root files that describe the batch rather than belong to it.
[[nodiscard]] constexpr auto is_batch_metadata(std::string_view relative_path) -> bool {
    return relative_path == snapshot_file || relative_path == studies_manifest || relative_path == files_manifest ||
           relative_path.substr(0, reports_dir.size() + 1) == "_reports/";
}

/// Letters, digits, '.', '_' and '-', at most 128 characters, starting with a letter or digit.
[[nodiscard]] constexpr auto is_valid_batch_id(std::string_view id) -> bool {
    if (id.empty() || id.size() > 128) return false;
    for (std::size_t i = 0; i < id.size(); ++i) {
        const char c = id[i];
        const bool alnum = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        if (!alnum && (i == 0 || (c != '.' && c != '_' && c != '-'))) return false;
    }
    return true;
}

}  // namespace vision::layout
