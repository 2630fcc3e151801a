/**
 * @file pipeline.hpp
 * @brief The research-side ingest service
 *
 * One service instance owns a landing zone and its catalog. Every state
 * change goes through it, one batch at a time; the record is persisted after
 * each stage, so a run can stop anywhere and resume with run_pipeline.
 */

#pragma once

#include "vision/catalog/catalog.hpp"
#include "vision/common/confirmation.hpp"
#include "vision/common/timestamp.hpp"
#include "vision/ingest/landing.hpp"
#include "vision/ingest/policy.hpp"
#include "vision/ingest/record.hpp"
#include "vision/manifest/accession.hpp"
#include "vision/profiler/profiler.hpp"

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace vision {
class config;
}

namespace vision::ingest {

struct ingest_options {
    acceptance_policy policy;
    manifest::normalization_rules rules;
    /// Directory holding `<batch_id>.clinical_snapshot.tsv` fixtures; unset means no clinical data.
    std::optional<std::filesystem::path> clinical_dir;
    timestamp_source clock{now_utc};
    std::size_t workers{0};  ///< 0 picks default_worker_count()

    /// Policy, accession rules and ingest.workers from config.
    [[nodiscard]] static auto from_config(const config& cfg) -> ingest_options;
};

struct run_options {
    /// Return once this state has been persisted, as if the process had been killed there.
    std::optional<batch_state> stop_after;
};

/// Scans files under `root` in parallel; results keep the order of `relative_paths`.
[[nodiscard]] auto scan_batch_files(const std::filesystem::path& root, const std::vector<std::string>& relative_paths,
                                    std::size_t workers) -> std::vector<dicom::file_scan>;

/// Read-only access to persisted records; safe while another process owns the landing zone.
[[nodiscard]] auto read_record(const landing_paths& paths, const std::string& batch_id) -> std::optional<batch_record>;
/// Every record in the landing zone, ordered by batch id.
[[nodiscard]] auto read_records(const landing_paths& paths) -> std::vector<batch_record>;

class ingest_service {
public:
    ingest_service(std::filesystem::path landing, ingest_options options);

    /**
     * @brief Moves `<inbox>/<batch_id>` into the landing zone and records it as RECEIVED.
     *
     * Throws DUPLICATE_BATCH if the landing zone already holds the id,
     * NOT_FOUND if the inbox does not.
     */
    auto receive_batch(const std::filesystem::path& inbox, const std::string& batch_id) -> batch_record;

    /**
     * @brief Drives a batch from its current state to VERIFIED, UNVERIFIED or REJECTED.
     *
     * A stage failure leaves the record in its last completed state with
     * error_detail set, then rethrows. Terminal and confirmed batches are
     * returned unchanged.
     */
    auto run_pipeline(const std::string& batch_id, const run_options& run = {}) -> batch_record;

    /// VERIFIED/UNVERIFIED -> CONFIRMED; repeating returns the first event. Else ILLEGAL_TRANSITION.
    auto confirm_receipt(const std::string& batch_id) -> confirmation_event;
    /// Operator rejection from VERIFIED/UNVERIFIED; repeating on a REJECTED batch is a no-op.
    auto reject_batch(const std::string& batch_id, const std::string& reason) -> batch_record;
    /// Flags a REJECTED batch for re-sending under a new id. Else ILLEGAL_TRANSITION.
    auto request_retransfer(const std::string& batch_id) -> batch_record;

    [[nodiscard]] auto load_record(const std::string& batch_id) const -> std::optional<batch_record>;
    [[nodiscard]] auto list_records() const -> std::vector<batch_record>;
    [[nodiscard]] auto view() const -> catalog::catalog_view { return catalog_.view(); }
    [[nodiscard]] auto paths() const -> const landing_paths& { return paths_; }
    [[nodiscard]] auto options() const -> const ingest_options& { return options_; }

    /// Recomputes corpus statistics and rewrites corpus.json.
    auto refresh_corpus() -> profiler::corpus_stats;

private:
    [[nodiscard]] auto require_record(const std::string& batch_id) const -> batch_record;
    void save_record(const batch_record& record) const;
    void step(batch_record& record);

    landing_paths paths_;
    ingest_options options_;
    manifest::accession_normalizer normalizer_;
    catalog::catalog catalog_;
    mutable std::mutex mutex_;
};

}  // namespace vision::ingest
