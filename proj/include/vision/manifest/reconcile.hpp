/**
 * @file reconcile.hpp
 * @brief Reconciles a batch's manifests against what actually arrived
 */

#pragma once

#include "vision/dicom/header.hpp"
#include "vision/integrity/snapshot.hpp"
#include "vision/manifest/accession.hpp"
#include "vision/manifest/manifest.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace vision::manifest {

struct reconciliation_report {
    std::string batch_id;
    bool manifest_present{false};
    std::vector<std::string> missing_files;
    std::vector<std::string> unexpected_files;
    std::vector<std::string> digest_mismatches;
    std::vector<std::string> duplicate_sop_uids;
    std::vector<std::string> duplicate_accessions;
    std::vector<std::string> accession_format_violations;
    /// accession -> (expected by the study manifest, rows in the file manifest)
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> study_count_deltas;

    [[nodiscard]] auto clean() const -> bool;
};

struct reconcile_context {
    std::string batch_id;
    normalization_rules rules;
    /// Accessions already cataloged by earlier batches under a different study UID.
    std::vector<std::string> prior_accessions;
};

/**
 * @brief Compares manifest, snapshot and scanned headers for one batch.
 *
 * Without a manifest pair the report has manifest_present = false and every
 * manifest-dependent list empty; the batch is not treated as incomplete.
 * A received file that repeats the SOP UID of another received file is
 * reported under duplicate_sop_uids, not unexpected_files.
 */
[[nodiscard]] auto reconcile(const std::optional<batch_manifest_pair>& pair, const integrity::hash_snapshot& snapshot,
                             std::span<const dicom::header_record> headers, const reconcile_context& context)
    -> reconciliation_report;

void to_json(nlohmann::json& j, const reconciliation_report& r);
void from_json(const nlohmann::json& j, reconciliation_report& r);

}  // namespace vision::manifest
