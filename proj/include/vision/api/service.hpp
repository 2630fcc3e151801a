/**
 * @file service.hpp
 * @brief The /api/v1 request handler, independent of any transport
 *
 * Every response body is an envelope:
 *
 *     {"data": <payload>, "ok": true}
 *     {"error": {"code": "...", "message": "..."}, "ok": false}
 *
 * Reports already on disk are spliced into the body verbatim, so a client
 * sees the same bytes the landing zone holds.
 */

#pragma once

#include "vision/common/confirmation.hpp"
#include "vision/ingest/pipeline.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace vision::api {

inline constexpr std::string_view prefix = "/api/v1";

struct response {
    int status{200};
    std::string body;
};

/// Dimensions accepted by /corpus/distribution.
[[nodiscard]] auto distribution_dimensions() -> const std::vector<std::string>&;

/// One line of api.mutations.ndjson.
struct mutation_entry {
    std::string at;
    std::string action;  ///< confirm | reject | request-retransfer
    std::string batch_id;
    std::optional<ingest::batch_state> from;
    std::optional<ingest::batch_state> to;
    int status{};

    bool operator==(const mutation_entry&) const = default;
};

void to_json(nlohmann::json& j, const mutation_entry& m);
void from_json(const nlohmann::json& j, mutation_entry& m);

class service {
public:
    /// Called after a confirmation succeeds, outside the mutation lock.
    using confirm_hook = std::function<void(const confirmation_event&)>;

    explicit service(ingest::ingest_service& ingest, confirm_hook on_confirm = {});

    [[nodiscard]] auto handle(std::string_view method, std::string_view path,
                              const std::map<std::string, std::string>& query, std::string_view body) -> response;

    [[nodiscard]] auto list_batches() const -> response;
    [[nodiscard]] auto get_batch(const std::string& id) const -> response;
    [[nodiscard]] auto corpus_stats() const -> response;
    [[nodiscard]] auto distribution(const std::string& dim) const -> response;
    auto confirm(const std::string& id) -> response;
    auto reject(const std::string& id, std::string_view body) -> response;
    auto request_retransfer(const std::string& id) -> response;

private:
    template <typename Fn>
    auto mutate(const std::string& action, const std::string& id, Fn&& fn) -> response;
    [[nodiscard]] auto corpus_text() const -> std::string;

    ingest::ingest_service& ingest_;
    confirm_hook on_confirm_;
    std::mutex mutation_mutex_;
};

[[nodiscard]] auto ok_body(const nlohmann::json& data) -> std::string;
[[nodiscard]] auto error_response(int status, std::string_view code, std::string_view message) -> response;

}  // namespace vision::api
