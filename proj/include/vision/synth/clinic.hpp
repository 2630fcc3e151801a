/**
 * @file clinic.hpp
 * @brief The simulated clinical side: staging, transfer and deletion
 *
 * Layout under the staging directory:
 *
 *     <staging>/<batch_id>/                   staged batch root
 *     <staging>/_clinic/clock                 virtual clock, seconds since epoch
 *     <staging>/_clinic/<batch_id>.staged.json
 *     <staging>/_clinic/<batch_id>.confirmation.json
 *     <staging>/_clinic/<batch_id>.deletion.json
 *
 * Clinical snapshot fixtures go to `<clinical>/<batch_id>.clinical_snapshot.tsv`.
 */

#pragma once

#include "vision/common/confirmation.hpp"
#include "vision/synth/batch.hpp"
#include "vision/synth/clock.hpp"
#include "vision/synth/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vision::synth {

struct transfer_result {
    std::uint64_t bytes{};
    double elapsed{};         ///< virtual seconds
    double effective_rate{};  ///< bytes per second
    std::string started_at;
    std::string finished_at;
};

void to_json(nlohmann::json& j, const transfer_result& r);

struct deletion_record {
    std::string batch_id;
    std::vector<std::string> accession_list;
    std::vector<std::string> digests;  ///< sorted digests of every staged file at deletion
    std::string deleted_at;
    confirmation_event confirmation;

    bool operator==(const deletion_record&) const = default;
};

void to_json(nlohmann::json& j, const deletion_record& r);
void from_json(const nlohmann::json& j, deletion_record& r);

/// Path of a batch's clinical snapshot fixture.
[[nodiscard]] auto clinical_snapshot_path(const std::filesystem::path& clinical_dir, const std::string& batch_id)
    -> std::filesystem::path;

/// Letters, digits, '.', '_' and '-', starting with a letter or digit.
[[nodiscard]] auto valid_batch_id(const std::string& batch_id) -> bool;

class clinic {
public:
    /// Restores the persisted clock if it is later than `start`.
    clinic(std::filesystem::path staging, std::filesystem::path clinical, extraction_model model,
           double start = static_cast<double>(default_clock_start));

    /**
     * @brief Extracts the studies' accessions on the virtual clock, then assembles and stages the batch.
     *
     * Throws vision::error(invalid_argument) for an invalid or already used batch id.
     */
    auto stage(const std::string& batch_id, const std::vector<study_spec>& studies,
               const std::vector<fault_descriptor>& faults, std::uint64_t seed, const assemble_options& options = {})
        -> assembled_batch;

    /**
     * @brief Copies the batch root to `<inbox>/<batch_id>` at the modeled rate.
     *
     * A cap of 0 means uncapped. Throws not_found for an unknown batch,
     * invalid_argument for a deleted one or an occupied inbox slot.
     */
    auto transfer_batch(const std::string& batch_id, const std::filesystem::path& inbox, double bandwidth_cap)
        -> transfer_result;

    /// Stores a confirmation for a later delete_on_confirmation call.
    void receive_confirmation(const confirmation_event& event);

    /**
     * @brief Removes the staged root once receipt has been confirmed.
     *
     * Uses `event` if given, otherwise a previously received one. Without
     * either, throws vision::error(confirmation_required). A second call
     * returns the existing record without touching anything.
     */
    auto delete_on_confirmation(const std::string& batch_id, const std::optional<confirmation_event>& event = {})
        -> deletion_record;

    [[nodiscard]] auto find(const std::string& batch_id) const -> std::optional<staged_batch>;
    [[nodiscard]] auto deletion(const std::string& batch_id) const -> std::optional<deletion_record>;
    [[nodiscard]] auto staged_batches() const -> std::vector<staged_batch>;

    [[nodiscard]] auto clock() -> virtual_clock& { return clock_; }
    [[nodiscard]] auto model() const -> const extraction_model& { return model_; }
    [[nodiscard]] auto staging_dir() const -> const std::filesystem::path& { return staging_; }

private:
    [[nodiscard]] auto state_dir() const -> std::filesystem::path;
    void save_clock() const;

    std::filesystem::path staging_;
    std::filesystem::path clinical_;
    extraction_model model_;
    virtual_clock clock_;
};

}  // namespace vision::synth
