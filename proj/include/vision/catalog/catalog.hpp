/**
 * @file catalog.hpp
 * @brief Persistent image-metadata catalog with batch-atomic upserts
 *
 * On disk, a directory holding:
 *   - `catalog.ndjson`: append-only log. Each upsert writes its changed
 *     entries followed by one commit line; lines after the last commit are
 *     discarded on open.
 *   - `catalog.idx`: key -> byte offset of the latest committed line,
 *     rebuilt from the log whenever it is missing or stale.
 *
 * One writer, many readers. Readers hold a `catalog_view`, an immutable
 * point-in-time state that never exposes a half-applied batch.
 */

#pragma once

#include "vision/catalog/clinical.hpp"
#include "vision/catalog/entry.hpp"
#include "vision/manifest/accession.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vision::catalog {

struct upsert_counts {
    std::size_t inserted{};
    std::size_t unchanged{};
    std::size_t conflicted{};

    bool operator==(const upsert_counts&) const = default;
};

struct link_report {
    std::size_t linked{};
    std::vector<std::string> orphan_images;  ///< entry keys
    std::vector<std::string> orphan_rows;    ///< accessions as they appear in the snapshot
};

void to_json(nlohmann::json& j, const link_report& r);
void from_json(const nlohmann::json& j, link_report& r);

/**
 * @brief Joins entries to snapshot rows on normalized accession and sets link_status.
 *
 * An accession matching rows of more than one patient is AMBIGUOUS; corrupt
 * entries and entries without a matching row are ORPHAN_IMAGE.
 */
auto link_clinical(std::span<catalog_entry> entries, std::span<const clinical_snapshot_row> snapshot,
                   const manifest::accession_normalizer& normalizer) -> link_report;

/// Conjunctive filter; unset fields match everything. Dates compare as YYYYMMDD text, inclusive.
struct catalog_filter {
    std::optional<std::string> modality;
    std::optional<std::string> manufacturer;
    std::optional<std::string> study_date_from;
    std::optional<std::string> study_date_to;
    std::optional<dicom::scan_status> parse_status;
    std::optional<link_status> link;
    std::optional<std::string> batch_id;

    [[nodiscard]] static auto field_names() -> const std::vector<std::string>&;
    /// Throws vision::error(unknown_filter_field) listing the valid fields, or invalid_argument for a bad value.
    [[nodiscard]] static auto from_pairs(const std::map<std::string, std::string>& pairs) -> catalog_filter;

    [[nodiscard]] auto matches(const catalog_entry& e) const -> bool;
};

using entry_map = std::map<std::string, catalog_entry>;

/// Immutable snapshot of the catalog contents.
class catalog_view {
public:
    catalog_view() : entries_(std::make_shared<const entry_map>()) {}
    explicit catalog_view(std::shared_ptr<const entry_map> entries) : entries_(std::move(entries)) {}

    /// Ordered by (study_uid, sop_uid, key).
    [[nodiscard]] auto query(const catalog_filter& filter) const -> std::vector<catalog_entry>;
    [[nodiscard]] auto all() const -> std::vector<catalog_entry> { return query({}); }
    [[nodiscard]] auto find(const std::string& key) const -> const catalog_entry*;
    [[nodiscard]] auto size() const -> std::size_t { return entries_->size(); }
    [[nodiscard]] auto entries() const -> const entry_map& { return *entries_; }

private:
    std::shared_ptr<const entry_map> entries_;
};

class catalog {
public:
    /// Creates the directory if needed, replays the log and repairs the index.
    [[nodiscard]] static auto open(const std::filesystem::path& dir) -> catalog;
    /// Committed entries only; never writes, so it is safe beside a live writer.
    [[nodiscard]] static auto load_view(const std::filesystem::path& dir) -> catalog_view;

    catalog(catalog&&) noexcept;
    catalog& operator=(catalog&&) noexcept;
    ~catalog();

    /**
     * Writes one committed block. Same key and digest is unchanged; a
     * different digest marks the stored entry AMBIGUOUS and appends both
     * digests to its audit list. Throws vision::error(io_error) with nothing
     * made visible on failure.
     */
    auto upsert_entries(std::span<const catalog_entry> entries, const std::string& batch_id) -> upsert_counts;

    [[nodiscard]] auto view() const -> catalog_view;
    [[nodiscard]] auto dir() const -> const std::filesystem::path&;
    [[nodiscard]] auto log_path() const -> std::filesystem::path;
    [[nodiscard]] auto index_path() const -> std::filesystem::path;

private:
    struct state;
    explicit catalog(std::unique_ptr<state> s);
    std::unique_ptr<state> state_;
};

/// Index file contents derived from the log alone.
[[nodiscard]] auto build_index_text(const std::filesystem::path& log_path) -> std::string;

}  // namespace vision::catalog
