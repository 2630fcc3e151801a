/**
 * @file record.hpp
 * @brief Batch records and the batch state machine
 *
 *     RECEIVED -> HASHED -> RECONCILED -> REJECTED
 *                                      -> SCANNED -> CATALOGED -> PROFILED -> VERIFIED | UNVERIFIED
 *     VERIFIED | UNVERIFIED -> CONFIRMED
 *     VERIFIED | UNVERIFIED -> REJECTED   (operator)
 *
 * REJECTED and CONFIRMED are terminal. A rejected batch comes back only as
 * a new batch id.
 */

#pragma once

#include "vision/common/confirmation.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace vision::ingest {

enum class batch_state {
    received,
    hashed,
    reconciled,
    scanned,
    cataloged,
    profiled,
    verified,
    unverified,
    rejected,
    confirmed,
};

[[nodiscard]] auto to_string(batch_state s) -> std::string_view;
[[nodiscard]] auto parse_batch_state(std::string_view text) -> std::optional<batch_state>;
[[nodiscard]] auto all_batch_states() -> const std::vector<batch_state>&;

[[nodiscard]] auto is_legal_transition(batch_state from, batch_state to) -> bool;
[[nodiscard]] auto is_terminal(batch_state s) -> bool;

struct batch_counts {
    std::uint64_t files{};
    std::uint64_t studies{};
    std::uint64_t corrupt{};
    std::uint64_t legacy{};
    std::uint64_t modern{};
    std::uint64_t bytes{};

    bool operator==(const batch_counts&) const = default;
};

struct transition_entry {
    batch_state from{};
    batch_state to{};
    std::string at;
    std::string action;

    bool operator==(const transition_entry&) const = default;
};

struct batch_record {
    std::string batch_id;
    batch_state state{batch_state::received};
    std::string received_at;
    batch_counts counts;
    /// Report name -> path relative to the batch directory.
    std::map<std::string, std::string> reports;
    bool manifest_present{false};
    std::optional<std::string> rejection_reason;
    /// Last stage failure; cleared when a stage completes.
    std::optional<std::string> error_detail;
    bool retransfer_requested{false};
    std::optional<confirmation_event> confirmation;
    std::vector<transition_entry> history;

    bool operator==(const batch_record&) const = default;
};

/// Moves `record` to `to`, appending history. Throws vision::error(illegal_transition) naming both states.
void advance(batch_record& record, batch_state to, std::string at, std::string action);

void to_json(nlohmann::json& j, const batch_record& r);
void from_json(const nlohmann::json& j, batch_record& r);

}  // namespace vision::ingest
