/**
 * @file record.cpp
 */

#include "vision/ingest/record.hpp"

#include "vision/common/error.hpp"

#include <array>
#include <utility>

namespace vision::ingest {

namespace {

constexpr std::array<std::pair<batch_state, std::string_view>, 10> state_names{{
    {batch_state::received, "RECEIVED"},
    {batch_state::hashed, "HASHED"},
    {batch_state::reconciled, "RECONCILED"},
    {batch_state::scanned, "SCANNED"},
    {batch_state::cataloged, "CATALOGED"},
    {batch_state::profiled, "PROFILED"},
    {batch_state::verified, "VERIFIED"},
    {batch_state::unverified, "UNVERIFIED"},
    {batch_state::rejected, "REJECTED"},
    {batch_state::confirmed, "CONFIRMED"},
}};

constexpr std::array<std::pair<batch_state, batch_state>, 12> legal_edges{{
    {batch_state::received, batch_state::hashed},
    {batch_state::hashed, batch_state::reconciled},
    {batch_state::reconciled, batch_state::rejected},
    {batch_state::reconciled, batch_state::scanned},
    {batch_state::scanned, batch_state::cataloged},
    {batch_state::cataloged, batch_state::profiled},
    {batch_state::profiled, batch_state::verified},
    {batch_state::profiled, batch_state::unverified},
    {batch_state::verified, batch_state::confirmed},
    {batch_state::unverified, batch_state::confirmed},
    {batch_state::verified, batch_state::rejected},
    {batch_state::unverified, batch_state::rejected},
}};

}  // namespace

auto to_string(batch_state s) -> std::string_view {
    for (const auto& [state, name] : state_names) {
        if (state == s) return name;
    }
    return "RECEIVED";
}

auto parse_batch_state(std::string_view text) -> std::optional<batch_state> {
    for (const auto& [state, name] : state_names) {
        if (name == text) return state;
    }
    return std::nullopt;
}

auto all_batch_states() -> const std::vector<batch_state>& {
    static const std::vector<batch_state> states = [] {
        std::vector<batch_state> out;
        for (const auto& [state, name] : state_names) out.push_back(state);
        return out;
    }();
    return states;
}

auto is_legal_transition(batch_state from, batch_state to) -> bool {
    for (const auto& [a, b] : legal_edges) {
        if (a == from && b == to) return true;
    }
    return false;
}

auto is_terminal(batch_state s) -> bool { return s == batch_state::rejected || s == batch_state::confirmed; }

void advance(batch_record& record, batch_state to, std::string at, std::string action) {
    if (!is_legal_transition(record.state, to)) {
        throw error(error_code::illegal_transition, "batch " + record.batch_id + ": cannot move from " +
                                                        std::string(to_string(record.state)) + " to " +
                                                        std::string(to_string(to)));
    }
    record.history.push_back({record.state, to, std::move(at), std::move(action)});
    record.state = to;
}

void to_json(nlohmann::json& j, const batch_record& r) {
    auto history = nlohmann::json::array();
    for (const auto& h : r.history) {
        history.push_back({{"from", std::string(to_string(h.from))},
                           {"to", std::string(to_string(h.to))},
                           {"at", h.at},
                           {"action", h.action}});
    }
    j = nlohmann::json{
        {"batch_id", r.batch_id},
        {"state", std::string(to_string(r.state))},
        {"received_at", r.received_at},
        {"counts",
         {{"files", r.counts.files},
          {"studies", r.counts.studies},
          {"corrupt", r.counts.corrupt},
          {"legacy", r.counts.legacy},
          {"modern", r.counts.modern},
          {"bytes", r.counts.bytes}}},
        {"reports", r.reports},
        {"manifest_present", r.manifest_present},
        {"rejection_reason", r.rejection_reason ? nlohmann::json(*r.rejection_reason) : nlohmann::json(nullptr)},
        {"error_detail", r.error_detail ? nlohmann::json(*r.error_detail) : nlohmann::json(nullptr)},
        {"retransfer_requested", r.retransfer_requested},
        {"confirmation", r.confirmation ? nlohmann::json(*r.confirmation) : nlohmann::json(nullptr)},
        {"history", history},
    };
}

void from_json(const nlohmann::json& j, batch_record& r) {
    auto state_of = [](const nlohmann::json& v) {
        const auto s = parse_batch_state(v.get<std::string>());
        if (!s) throw error(error_code::invalid_argument, "unknown batch state " + v.get<std::string>());
        return *s;
    };
    j.at("batch_id").get_to(r.batch_id);
    r.state = state_of(j.at("state"));
    j.at("received_at").get_to(r.received_at);
    const auto& c = j.at("counts");
    r.counts = {c.at("files"), c.at("studies"), c.at("corrupt"), c.at("legacy"), c.at("modern"), c.at("bytes")};
    j.at("reports").get_to(r.reports);
    j.at("manifest_present").get_to(r.manifest_present);
    auto optional_text = [](const nlohmann::json& v) {
        return v.is_null() ? std::nullopt : std::optional<std::string>(v.get<std::string>());
    };
    r.rejection_reason = optional_text(j.at("rejection_reason"));
    r.error_detail = optional_text(j.at("error_detail"));
    j.at("retransfer_requested").get_to(r.retransfer_requested);
    r.confirmation = j.at("confirmation").is_null()
                         ? std::nullopt
                         : std::optional<confirmation_event>(j.at("confirmation").get<confirmation_event>());
    r.history.clear();
    for (const auto& h : j.at("history")) {
        r.history.push_back({state_of(h.at("from")), state_of(h.at("to")), h.at("at"), h.at("action")});
    }
}

}  // namespace vision::ingest
