/**
 * @file batch.hpp
 * @brief Batch assembly with manifests and injected faults
 *
 * Content faults (STRIP_DICM_MAGIC, PREFIX_ACCESSION, DUPLICATE_ACCESSION)
 * shape what the clinical side sends, so the manifests describe the faulty
 * files. Transfer faults (DROP_FILE, DUPLICATE_FILE, CORRUPT_FILE,
 * TRUNCATE_FILE, EXTRA_UNLISTED_FILE) act on the staged tree after the
 * manifests are written. OMIT_MANIFESTS skips writing them.
 */

#pragma once

#include "vision/catalog/clinical.hpp"
#include "vision/synth/study.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace vision::synth {

enum class fault_kind {
    omit_manifests,
    drop_file,
    duplicate_file,
    corrupt_file,
    truncate_file,
    strip_dicm_magic,
    prefix_accession,
    duplicate_accession,
    extra_unlisted_file,
};

[[nodiscard]] auto to_string(fault_kind k) -> std::string_view;
[[nodiscard]] auto all_fault_kinds() -> const std::vector<fault_kind>&;

struct fault_descriptor {
    fault_kind kind{};
    std::uint32_t count{1};  ///< files or studies affected

    bool operator==(const fault_descriptor&) const = default;
};

/// "KIND" or "KIND:count"; throws vision::error(unknown_fault_kind) for an unknown kind.
[[nodiscard]] auto parse_fault(std::string_view text) -> fault_descriptor;

/// One concrete effect of a fault, for test oracles and audit.
struct applied_fault {
    fault_kind kind{};
    std::string path;  ///< affected file, if any
    std::string sop_uid;
    std::string accession_number;

    bool operator==(const applied_fault&) const = default;
};

struct staged_batch {
    std::string batch_id;
    std::filesystem::path root;
    std::vector<std::string> accession_list;
    bool manifests_included{true};
    std::vector<fault_descriptor> faults_requested;
    std::vector<applied_fault> faults_applied;
    std::string staged_at;
    std::uint64_t seed{};
    std::uint64_t file_count{};  ///< DICOM files present after faults
    std::uint64_t bytes{};       ///< every file under root, manifests included

    bool operator==(const staged_batch&) const = default;
};

void to_json(nlohmann::json& j, const staged_batch& b);
void from_json(const nlohmann::json& j, staged_batch& b);

struct assemble_options {
    std::string accession_prefix{"ZZ-"};
    generation_profile profile;
};

struct assembled_batch {
    staged_batch batch;
    /// One row per (patient, accession), with accessions in canonical form.
    std::vector<catalog::clinical_snapshot_row> clinical;
    /// Specs as actually generated (after content faults), in input order.
    std::vector<study_spec> studies;
    std::vector<std::uint64_t> study_seeds;
};

/**
 * @brief Generates every study under `root`, writes manifests, applies faults.
 *
 * `root` must not exist yet. Accessions must be unique across studies.
 * Throws vision::error(invalid_argument) when a fault cannot be applied
 * (for example, more files requested than the batch has).
 */
[[nodiscard]] auto assemble_batch(const std::string& batch_id, const std::filesystem::path& root,
                                  const std::vector<study_spec>& studies, const std::vector<fault_descriptor>& faults,
                                  std::uint64_t seed, const std::string& staged_at,
                                  const assemble_options& options = {}) -> assembled_batch;

}  // namespace vision::synth
