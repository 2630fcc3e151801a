/**
 * @file service.cpp
 */

#include "vision/api/service.hpp"

#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"
#include "vision/common/json.hpp"

#include <algorithm>
#include <filesystem>

namespace vision::api {

namespace fs = std::filesystem;

namespace {

auto status_for(error_code code) -> int {
    switch (code) {
        case error_code::not_found: return 404;
        case error_code::illegal_transition:
        case error_code::duplicate_batch:
        case error_code::lock_held: return 409;
        case error_code::invalid_argument:
        case error_code::unknown_filter_field: return 400;
        default: return 500;
    }
}

auto split_path(std::string_view path) -> std::vector<std::string> {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto slash = path.find('/', start);
        const auto end = slash == std::string_view::npos ? path.size() : slash;
        if (end > start) parts.emplace_back(path.substr(start, end - start));
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    return parts;
}

/// Raw JSON text as the value of `"data"`; the text is not re-serialized.
auto ok_raw(const std::string& data_text) -> response {
    return {200, "{\n  \"data\": " + data_text + ",\n  \"ok\": true\n}\n"};
}

auto is_json_report(const std::string& relative) -> bool { return relative.ends_with(".json"); }

}  // namespace

auto distribution_dimensions() -> const std::vector<std::string>& {
    static const std::vector<std::string> dims{"manufacturer", "modality", "view_position"};
    return dims;
}

void to_json(nlohmann::json& j, const mutation_entry& m) {
    const auto state = [](const std::optional<ingest::batch_state>& s) -> nlohmann::json {
        return s ? nlohmann::json(std::string(to_string(*s))) : nlohmann::json(nullptr);
    };
    j = {{"at", m.at},          {"action", m.action}, {"batch_id", m.batch_id},
         {"from", state(m.from)}, {"to", state(m.to)},  {"status", m.status}};
}

void from_json(const nlohmann::json& j, mutation_entry& m) {
    const auto state = [](const nlohmann::json& v) -> std::optional<ingest::batch_state> {
        if (v.is_null()) return std::nullopt;
        return ingest::parse_batch_state(v.get<std::string>());
    };
    m.at = j.at("at").get<std::string>();
    m.action = j.at("action").get<std::string>();
    m.batch_id = j.at("batch_id").get<std::string>();
    m.from = state(j.at("from"));
    m.to = state(j.at("to"));
    m.status = j.at("status").get<int>();
}

auto ok_body(const nlohmann::json& data) -> std::string {
    return canonical_json(nlohmann::json{{"data", data}, {"ok", true}});
}

auto error_response(int status, std::string_view code, std::string_view message) -> response {
    return {status, canonical_json(nlohmann::json{
                        {"error", {{"code", std::string(code)}, {"message", std::string(message)}}}, {"ok", false}})};
}

service::service(ingest::ingest_service& ingest, confirm_hook on_confirm)
    : ingest_(ingest), on_confirm_(std::move(on_confirm)) {}

auto service::handle(std::string_view method, std::string_view path, const std::map<std::string, std::string>& query,
                     std::string_view body) -> response {
    try {
        if (!path.starts_with(prefix) || (path.size() > prefix.size() && path[prefix.size()] != '/')) {
            return error_response(404, "NOT_FOUND", "no route " + std::string(path));
        }
        const auto parts = split_path(path.substr(prefix.size()));
        const bool get = method == "GET";
        const bool post = method == "POST";
        const auto wrong_method = [&] {
            return error_response(405, "METHOD_NOT_ALLOWED",
                                  std::string(method) + " is not allowed on " + std::string(path));
        };

        if (parts.size() == 1 && parts[0] == "batches") return get ? list_batches() : wrong_method();
        if (parts.size() == 2 && parts[0] == "batches") return get ? get_batch(parts[1]) : wrong_method();
        if (parts.size() == 3 && parts[0] == "batches") {
            if (!post) return wrong_method();
            if (parts[2] == "confirm") return confirm(parts[1]);
            if (parts[2] == "reject") return reject(parts[1], body);
            if (parts[2] == "request-retransfer") return request_retransfer(parts[1]);
        }
        if (parts.size() == 2 && parts[0] == "corpus") {
            if (!get) return wrong_method();
            if (parts[1] == "stats") return corpus_stats();
            if (parts[1] == "distribution") {
                const auto dim = query.find("dim");
                if (dim == query.end()) return error_response(400, "INVALID_ARGUMENT", "missing query parameter dim");
                return distribution(dim->second);
            }
        }
        return error_response(404, "NOT_FOUND", "no route " + std::string(path));
    } catch (const error& e) {
        return error_response(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception&) {
        return error_response(500, "INTERNAL", "internal error");
    }
}

auto service::list_batches() const -> response {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : ingest_.list_records()) {
        const nlohmann::json full = r;
        nlohmann::json row;
        for (const auto* key : {"batch_id", "counts", "error_detail", "manifest_present", "received_at",
                                "rejection_reason", "retransfer_requested", "state"}) {
            row[key] = full.at(key);
        }
        rows.push_back(std::move(row));
    }
    return {200, ok_body(rows)};
}

auto service::get_batch(const std::string& id) const -> response {
    const auto& paths = ingest_.paths();
    const auto record = ingest_.load_record(id);
    if (!record) return error_response(404, "NOT_FOUND", "unknown batch " + id);

    std::string data = "{\n\"record\": " + read_text(paths.record(id)) + ",\n\"reports\": {";
    bool first = true;
    for (const auto& [name, relative] : record->reports) {
        const auto file = paths.batch_dir(id) / relative;
        if (name == "record" || !is_json_report(relative) || !fs::exists(file)) continue;
        data += (first ? "\n" : ",\n") + nlohmann::json(name).dump() + ": " + read_text(file);
        first = false;
    }
    data += "}\n}";
    return ok_raw(data);
}

auto service::corpus_text() const -> std::string {
    const auto path = ingest_.paths().corpus_report();
    if (fs::exists(path)) return read_text(path);
    // Not written yet: compute without touching the landing zone.
    const auto records = ingest_.list_records();
    return profiler::serialize(profiler::profile_corpus(ingest_.view(), records));
}

auto service::corpus_stats() const -> response { return ok_raw(corpus_text()); }

auto service::distribution(const std::string& dim) const -> response {
    const auto& dims = distribution_dimensions();
    if (std::find(dims.begin(), dims.end(), dim) == dims.end()) {
        std::string valid;
        for (const auto& d : dims) valid += (valid.empty() ? "" : ", ") + d;
        return error_response(400, "INVALID_ARGUMENT", "unknown dimension '" + dim + "'; valid: " + valid);
    }
    const auto stats = nlohmann::json::parse(corpus_text());
    const auto& counts = stats.at("histograms").at(dim);
    std::uint64_t total = 0;
    for (const auto& [value, n] : counts.items()) total += n.get<std::uint64_t>();
    return {200, ok_body({{"counts", counts}, {"dim", dim}, {"total", total}})};
}

template <typename Fn>
auto service::mutate(const std::string& action, const std::string& id, Fn&& fn) -> response {
    std::lock_guard lock(mutation_mutex_);
    mutation_entry entry;
    entry.action = action;
    entry.batch_id = id;
    if (const auto before = ingest_.load_record(id)) entry.from = before->state;
    response out;
    try {
        out = fn();
    } catch (const error& e) {
        out = error_response(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception&) {
        out = error_response(500, "INTERNAL", "internal error");
    }
    if (const auto after = ingest_.load_record(id)) entry.to = after->state;
    entry.status = out.status;
    entry.at = ingest_.options().clock();
    if (entry.from) {
        fs::create_directories(ingest_.paths().mutation_log().parent_path());
        append_durable(ingest_.paths().mutation_log(), nlohmann::json(entry).dump() + "\n");
    }
    return out;
}

auto service::confirm(const std::string& id) -> response {
    std::optional<confirmation_event> event;
    auto out = mutate("confirm", id, [&] {
        event = ingest_.confirm_receipt(id);
        return response{200, ok_body({{"confirmation", *event}, {"record", *ingest_.load_record(id)}})};
    });
    if (event && on_confirm_) {
        try {
            on_confirm_(*event);
        } catch (const std::exception& e) {
            auto j = nlohmann::json::parse(out.body);
            j["data"]["handoff_error"] = e.what();
            out.body = canonical_json(j);
        }
    }
    return out;
}

auto service::reject(const std::string& id, std::string_view body) -> response {
    const auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("reason") || !parsed["reason"].is_string() ||
        parsed["reason"].get<std::string>().empty()) {
        return error_response(400, "MALFORMED_BODY", R"(expected {"reason": "<non-empty text>"})");
    }
    const auto reason = parsed["reason"].get<std::string>();
    return mutate("reject", id, [&] { return response{200, ok_body(ingest_.reject_batch(id, reason))}; });
}

auto service::request_retransfer(const std::string& id) -> response {
    return mutate("request-retransfer", id,
                  [&] { return response{200, ok_body(ingest_.request_retransfer(id))}; });
}

}  // namespace vision::api
