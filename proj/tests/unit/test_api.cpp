#include <doctest.h>

#include "pipeline_support.hpp"
#include "vision/api/server.hpp"
#include "vision/api/service.hpp"
#include "vision/common/file_io.hpp"

#include <httplib.h>

#include <random>
#include <thread>

using vision::api::response;
using vision::ingest::batch_state;
using vision::synth::fault_kind;
using vision::synth::modality;
using vision::synth::plan_studies;
using vision::testing::pipeline_env;
namespace fs = std::filesystem;

namespace {

auto body_of(const response& r) -> nlohmann::json { return nlohmann::json::parse(r.body); }

auto get(vision::api::service& api, const std::string& path, std::map<std::string, std::string> query = {})
    -> response {
    return api.handle("GET", path, query, "");
}

auto post(vision::api::service& api, const std::string& path, const std::string& body = "") -> response {
    return api.handle("POST", path, {}, body);
}

void check_envelope(const response& r) {
    const auto j = body_of(r);
    CHECK(j.at("ok").get<bool>() == (r.status == 200));
    if (r.status == 200) {
        CHECK(j.contains("data"));
        CHECK_FALSE(j.contains("error"));
    } else {
        CHECK_FALSE(j.contains("data"));
        CHECK(j.at("error").size() == 2);
        CHECK(j.at("error").at("code").is_string());
        CHECK(j.at("error").at("message").is_string());
    }
}

}  // namespace

TEST_CASE("batch listing on a fresh landing zone is empty") {
    pipeline_env env;
    vision::api::service api(*env.service);
    const auto r = get(api, "/api/v1/batches");
    CHECK(r.status == 200);
    check_envelope(r);
    CHECK(body_of(r)["data"] == nlohmann::json::array());
}

TEST_CASE("confirm follows the state machine") {
    pipeline_env env;
    std::vector<vision::confirmation_event> handed_off;
    vision::api::service api(*env.service, [&](const auto& e) { handed_off.push_back(e); });
    (void)env.stage_and_send("B1", plan_studies(modality::cr, 1, 1), {}, 1);
    (void)env.service->receive_batch(env.inbox(), "B1");

    const auto early = post(api, "/api/v1/batches/B1/confirm");
    CHECK(early.status == 409);
    check_envelope(early);
    CHECK(body_of(early)["error"]["code"] == "ILLEGAL_TRANSITION");
    CHECK(env.service->load_record("B1")->state == batch_state::received);
    CHECK(handed_off.empty());

    (void)env.service->run_pipeline("B1");
    const auto first = post(api, "/api/v1/batches/B1/confirm");
    CHECK(first.status == 200);
    check_envelope(first);
    CHECK(body_of(first)["data"]["record"]["state"] == "CONFIRMED");
    const auto again = post(api, "/api/v1/batches/B1/confirm");
    CHECK(again.status == 200);
    CHECK(body_of(again)["data"]["confirmation"] == body_of(first)["data"]["confirmation"]);
    CHECK(handed_off.size() == 2);
    CHECK(handed_off[0] == handed_off[1]);
}

TEST_CASE("error statuses") {
    pipeline_env env;
    vision::api::service api(*env.service);
    (void)env.stage_and_send("B1", plan_studies(modality::cr, 1, 2), {}, 2);
    (void)env.ingest("B1");

    const std::vector<std::tuple<response, int, std::string>> cases{
        {get(api, "/api/v1/batches/NOPE"), 404, "NOT_FOUND"},
        {post(api, "/api/v1/batches/NOPE/confirm"), 404, "NOT_FOUND"},
        {post(api, "/api/v1/batches/B1/reject", "not json"), 400, "MALFORMED_BODY"},
        {post(api, "/api/v1/batches/B1/reject", R"({"reason": ""})"), 400, "MALFORMED_BODY"},
        {post(api, "/api/v1/batches/B1/reject", R"({"reason": 3})"), 400, "MALFORMED_BODY"},
        {post(api, "/api/v1/batches/B1/request-retransfer"), 409, "ILLEGAL_TRANSITION"},
        {get(api, "/api/v1/corpus/distribution", {{"dim", "colour"}}), 400, "INVALID_ARGUMENT"},
        {get(api, "/api/v1/corpus/distribution"), 400, "INVALID_ARGUMENT"},
        {get(api, "/api/v1/nothing"), 404, "NOT_FOUND"},
        {get(api, "/api/v10/batches"), 404, "NOT_FOUND"},
        {post(api, "/api/v1/batches"), 405, "METHOD_NOT_ALLOWED"},
        {get(api, "/api/v1/batches/B1/confirm"), 405, "METHOD_NOT_ALLOWED"},
    };
    for (const auto& [r, status, code] : cases) {
        CAPTURE(r.body);
        CHECK(r.status == status);
        check_envelope(r);
        CHECK(body_of(r)["error"]["code"] == code);
    }
    const auto dim = get(api, "/api/v1/corpus/distribution", {{"dim", "colour"}});
    for (const auto& valid : vision::api::distribution_dimensions()) {
        CHECK(body_of(dim)["error"]["message"].get<std::string>().find(valid) != std::string::npos);
    }
    CHECK(env.service->load_record("B1")->state == batch_state::verified);
}

TEST_CASE("batch detail embeds the on-disk reports byte for byte") {
    pipeline_env env;
    vision::api::service api(*env.service);
    (void)env.stage_and_send("B1", plan_studies(modality::cr, 2, 3), {{fault_kind::strip_dicm_magic, 1}}, 3);
    const auto record = env.ingest("B1");
    const auto r = get(api, "/api/v1/batches/B1");
    REQUIRE(r.status == 200);
    check_envelope(r);
    const auto data = body_of(r)["data"];
    CHECK(data["record"].get<vision::ingest::batch_record>() == record);

    std::size_t embedded = 0;
    for (const auto& [name, relative] : record.reports) {
        if (!relative.ends_with(".json") || name == "record") continue;
        const auto disk = vision::read_text(env.landing() / "B1" / relative);
        CAPTURE(name);
        CHECK(r.body.find(disk) != std::string::npos);
        CHECK(data["reports"][name] == nlohmann::json::parse(disk));
        ++embedded;
    }
    CHECK(embedded >= 5);
    CHECK(r.body.find(vision::read_text(env.service->paths().record("B1"))) != std::string::npos);

    const auto stats = get(api, "/api/v1/corpus/stats");
    CHECK(stats.body.find(vision::read_text(env.service->paths().corpus_report())) != std::string::npos);
}

TEST_CASE("distribution counts equal a direct catalog count") {
    pipeline_env env;
    vision::api::service api(*env.service);
    CHECK(body_of(get(api, "/api/v1/corpus/distribution", {{"dim", "modality"}}))["data"]["total"] == 0);
    (void)env.stage_and_send("C", plan_studies(modality::cr, 3, 4), {}, 4);
    (void)env.stage_and_send("M", plan_studies(modality::mr, 1, 5), {}, 5);
    (void)env.ingest("C");
    (void)env.ingest("M");
    for (const auto& dim : vision::api::distribution_dimensions()) {
        std::map<std::string, std::uint64_t> oracle;
        for (const auto& e : env.service->view().all()) {
            const auto& h = e.header;
            const auto& value = dim == "modality" ? h.modality : dim == "manufacturer" ? h.manufacturer : h.view_position;
            ++oracle[value.empty() ? "(none)" : value];
        }
        const auto r = get(api, "/api/v1/corpus/distribution", {{"dim", dim}});
        REQUIRE(r.status == 200);
        CAPTURE(dim);
        CHECK(body_of(r)["data"]["counts"].get<std::map<std::string, std::uint64_t>>() == oracle);
        CHECK(body_of(r)["data"]["total"] == env.service->view().size());
    }
}

TEST_CASE("property: replaying the mutation log through the state machine") {
    pipeline_env env;
    vision::api::service api(*env.service);
    std::vector<std::string> ids;
    for (int b = 0; b < 4; ++b) {
        const auto id = "B" + std::to_string(b);
        const auto faults = b == 3 ? std::vector<vision::synth::fault_descriptor>{{fault_kind::drop_file, 1}}
                                   : std::vector<vision::synth::fault_descriptor>{};
        (void)env.stage_and_send(id, plan_studies(modality::cr, 1, 10 + b), faults, 10 + b);
        (void)env.service->receive_batch(env.inbox(), id);
        if (b != 0) (void)env.service->run_pipeline(id);
        ids.push_back(id);
    }
    ids.emplace_back("GHOST");
    std::mt19937_64 rng(77);
    for (int i = 0; i < 200; ++i) {
        const auto& id = ids[rng() % ids.size()];
        switch (rng() % 3) {
            case 0: (void)post(api, "/api/v1/batches/" + id + "/confirm"); break;
            case 1: (void)post(api, "/api/v1/batches/" + id + "/reject", R"({"reason":"r"})"); break;
            default: (void)post(api, "/api/v1/batches/" + id + "/request-retransfer"); break;
        }
    }
    std::map<std::string, batch_state> replayed;
    std::istringstream log(vision::read_text(env.service->paths().mutation_log()));
    std::size_t lines = 0;
    for (std::string line; std::getline(log, line); ++lines) {
        const auto m = nlohmann::json::parse(line).get<vision::api::mutation_entry>();
        REQUIRE(m.from.has_value());
        REQUIRE(m.to.has_value());
        if (replayed.contains(m.batch_id)) CHECK(replayed[m.batch_id] == *m.from);
        if (m.status == 200) {
            CHECK((m.from == m.to || vision::ingest::is_legal_transition(*m.from, *m.to)));
        } else {
            CHECK(m.from == m.to);
        }
        replayed[m.batch_id] = *m.to;
    }
    CHECK(lines > 150);
    CHECK_FALSE(replayed.contains("GHOST"));
    for (const auto& [id, state] : replayed) CHECK(env.service->load_record(id)->state == state);
}

TEST_CASE("live HTTP server") {
    pipeline_env env;
    vision::api::service api(*env.service);
    (void)env.stage_and_send("B1", plan_studies(modality::cr, 1, 6), {}, 6);
    (void)env.ingest("B1");

    vision::api::server http(api);
    const int port = http.bind("127.0.0.1", 0);
    std::thread loop([&] { http.listen(); });
    httplib::Client client("127.0.0.1", port);

    const auto list = client.Get("/api/v1/batches");
    REQUIRE(list);
    CHECK(list->status == 200);
    CHECK(list->body == get(api, "/api/v1/batches").body);

    const auto dist = client.Get("/api/v1/corpus/distribution?dim=modality");
    REQUIRE(dist);
    CHECK(nlohmann::json::parse(dist->body)["data"]["counts"]["CR"] == env.service->view().size());

    const auto confirm = client.Post("/api/v1/batches/B1/confirm", "", "application/json");
    REQUIRE(confirm);
    CHECK(confirm->status == 200);
    CHECK(env.service->load_record("B1")->state == batch_state::confirmed);

    const auto missing = client.Get("/elsewhere");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(nlohmann::json::parse(missing->body)["ok"] == false);

    http.stop();
    loop.join();
}
