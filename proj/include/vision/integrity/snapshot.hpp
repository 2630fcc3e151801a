/**
 * @file snapshot.hpp
 * @brief Per-file hash snapshots of a received batch
 *
 * Serialized form (`_integrity.snapshot.tsv`, LF line endings):
 *
 *     #vision-snapshot v1<TAB>batch_id<TAB>created_at
 *     path<TAB>size<TAB>digest
 *     ...
 *
 * Entries are sorted by path so the same tree always serializes to the same
 * bytes for a given created_at.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace vision::integrity {

struct snapshot_entry {
    std::string path;  ///< relative, forward slashes
    std::uint64_t size{};
    std::string digest;

    bool operator==(const snapshot_entry&) const = default;
};

struct hash_snapshot {
    std::string batch_id;
    std::string created_at;
    std::vector<snapshot_entry> entries;

    bool operator==(const hash_snapshot&) const = default;

    [[nodiscard]] auto find(std::string_view path) const -> const snapshot_entry*;
};

struct verification_report {
    bool ok{true};
    std::vector<std::string> missing;
    std::vector<std::string> added;
    std::vector<std::string> mismatched;
};

/// Regular files below root (recursive), minus batch metadata files, as sorted relative paths.
[[nodiscard]] auto list_batch_files(const std::filesystem::path& root) -> std::vector<std::string>;

/**
 * @brief Hashes every batch file under root.
 *
 * All-or-nothing: an unreadable file aborts with vision::error(io_error)
 * naming that path.
 */
[[nodiscard]] auto snapshot_batch(const std::filesystem::path& root, std::string batch_id, std::string created_at,
                                  std::size_t workers = 0) -> hash_snapshot;

/// Never throws for content problems; unreadable files count as mismatched.
[[nodiscard]] auto verify_snapshot(const hash_snapshot& snapshot, const std::filesystem::path& root,
                                   std::size_t workers = 0) -> verification_report;

[[nodiscard]] auto serialize_snapshot(const hash_snapshot& snapshot) -> std::string;
[[nodiscard]] auto parse_snapshot(std::string_view text) -> hash_snapshot;

void save_snapshot(const hash_snapshot& snapshot, const std::filesystem::path& root);
[[nodiscard]] auto load_snapshot(const std::filesystem::path& root) -> hash_snapshot;

void to_json(nlohmann::json& j, const verification_report& r);

}  // namespace vision::integrity
