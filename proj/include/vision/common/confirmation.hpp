/**
 * @file confirmation.hpp
 * @brief Receipt confirmation sent from the research side to the clinical side
 */

#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace vision {

struct confirmation_event {
    std::string batch_id;
    std::string confirmed_at;
    std::string snapshot_digest;  ///< SHA-256 of the batch's integrity snapshot file

    bool operator==(const confirmation_event&) const = default;
};

inline void to_json(nlohmann::json& j, const confirmation_event& e) {
    j = nlohmann::json{{"batch_id", e.batch_id}, {"confirmed_at", e.confirmed_at}, {"snapshot_digest", e.snapshot_digest}};
}

inline void from_json(const nlohmann::json& j, confirmation_event& e) {
    j.at("batch_id").get_to(e.batch_id);
    j.at("confirmed_at").get_to(e.confirmed_at);
    j.at("snapshot_digest").get_to(e.snapshot_digest);
}

}  // namespace vision
