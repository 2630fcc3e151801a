/**
 * @file duplicates.hpp
 * @brief Cross-batch duplicate detection against the catalog
 */

#pragma once

#include "vision/catalog/catalog.hpp"
#include "vision/dicom/header.hpp"
#include "vision/manifest/accession.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace vision::ingest {

struct duplicate_report {
    std::vector<std::string> dup_files;    ///< SOP UIDs already cataloged by another batch
    std::vector<std::string> dup_studies;  ///< accessions already cataloged under another study UID
    std::vector<std::pair<std::string, std::string>> cross_batch;  ///< (sop_uid, prior batch_id)

    bool operator==(const duplicate_report&) const = default;
    [[nodiscard]] auto empty() const -> bool { return dup_files.empty() && dup_studies.empty(); }
};

/**
 * @brief Compares a batch's headers with what the catalog already holds. Read-only.
 *
 * Entries that `batch_id` itself cataloged earlier are not duplicates, so a
 * resumed run reports the same as an uninterrupted one.
 */
[[nodiscard]] auto detect_duplicates(std::span<const dicom::header_record> headers, const catalog::catalog_view& view,
                                     const std::string& batch_id, const manifest::accession_normalizer& normalizer)
    -> duplicate_report;

void to_json(nlohmann::json& j, const duplicate_report& r);
void from_json(const nlohmann::json& j, duplicate_report& r);

}  // namespace vision::ingest
