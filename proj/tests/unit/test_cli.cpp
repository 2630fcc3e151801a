#include <doctest.h>

#include "cli.hpp"
#include "support.hpp"
#include "vision/common/file_io.hpp"
#include "vision/ingest/landing.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace fs = std::filesystem;

namespace {

struct outcome {
    int code;
    std::string out;
    std::string err;
};

struct workspace {
    vision::testing::temp_dir dir{"vision-cli"};

    auto run(std::vector<std::string> args) const -> outcome {
        std::vector<std::string> full{"--inbox",   (dir / "inbox").string(),   "--landing", (dir / "landing").string(),
                                      "--staging", (dir / "staging").string(), "--clinical", (dir / "cdw").string()};
        full.insert(full.end(), args.begin(), args.end());
        std::ostringstream out;
        std::ostringstream err;
        const int code = vision::cli::run(full, out, err);
        return {code, out.str(), err.str()};
    }

    /// generate + transfer + ingest
    auto deliver(const std::string& id, std::uint64_t seed, std::vector<std::string> extra = {}) const -> outcome {
        std::vector<std::string> gen{"--seed", std::to_string(seed), "generate", "--batch", id, "--studies", "2"};
        gen.insert(gen.end(), extra.begin(), extra.end());
        REQUIRE(run(gen).code == 0);
        REQUIRE(run({"transfer", "--batch", id}).code == 0);
        return run({"ingest", "--batch", id});
    }
};

auto tree(const fs::path& root) -> std::map<std::string, std::string> {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = vision::read_text(e.path());
    }
    return out;
}

}  // namespace

TEST_CASE("generate is deterministic in its seed") {
    workspace a;
    workspace b;
    const std::vector<std::string> args{"--seed", "7", "generate", "--studies", "10", "--modality", "CR"};
    const auto first = a.run(args);
    const auto second = b.run(args);
    REQUIRE(first.code == 0);
    REQUIRE(second.code == 0);
    auto ja = nlohmann::json::parse(first.out);
    auto jb = nlohmann::json::parse(second.out);
    ja.erase("root");
    jb.erase("root");
    CHECK(ja == jb);
    const auto ta = tree(a.dir / "staging" / "batch-7");
    CHECK(ta.size() >= 62);
    CHECK(ta == tree(b.dir / "staging" / "batch-7"));
    CHECK(tree(a.dir / "cdw") == tree(b.dir / "cdw"));
}

TEST_CASE("ingest prints the terminal state") {
    workspace w;
    const auto clean = w.deliver("B1", 1);
    CHECK(clean.code == 0);
    CHECK(clean.out == "B1 VERIFIED\n");

    const auto dropped = w.deliver("B2", 2, {"--fault", "DROP_FILE"});
    CHECK(dropped.code == 1);
    CHECK(dropped.out == "B2 REJECTED\n");
    CHECK(dropped.err.find("missing") != std::string::npos);

    const auto again = w.run({"ingest", "--batch", "B1"});
    CHECK(again.code == 0);
    CHECK(again.out == "B1 VERIFIED\n");
}

TEST_CASE("verify names a flipped file") {
    workspace w;
    REQUIRE(w.deliver("B1", 3).code == 0);
    CHECK(w.run({"verify", "--batch", "B1"}).code == 0);

    const auto root = w.dir / "landing" / "B1";
    std::string victim;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.path().extension() == ".dcm") {
            victim = fs::relative(e.path(), root).generic_string();
            break;
        }
    }
    REQUIRE_FALSE(victim.empty());
    auto bytes = vision::read_bytes(root / victim);
    bytes[bytes.size() / 2] ^= 0x01;
    vision::write_bytes(root / victim, bytes);

    const auto r = w.run({"verify", "--batch", "B1"});
    CHECK(r.code == 1);
    CHECK(r.err.find("MISMATCHED " + victim) != std::string::npos);
    CHECK(nlohmann::json::parse(r.out)["mismatched"] == nlohmann::json::array({victim}));
}

TEST_CASE("usage errors exit 2 with usage on the error stream") {
    workspace w;
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"bogus"}, {}, {"verify"}, {"query", "--filter", "colour=red"}, {"query", "--filter", "modality"},
             {"generate", "--fault", "SET_ON_FIRE"}, {"generate", "--modality", "XR"}, {"ingest"}}) {
        CAPTURE(args.size());
        const auto r = w.run(args);
        CHECK(r.code == 2);
        CHECK(r.out.empty());
        CHECK_FALSE(r.err.empty());
    }
    const auto bogus = w.run({"bogus"});
    CHECK(bogus.err.find("unknown subcommand 'bogus'") != std::string::npos);
    CHECK(bogus.err.find("Subcommands:") != std::string::npos);
    CHECK(w.run({"query", "--filter", "colour=red"}).err.find("modality") != std::string::npos);
}

TEST_CASE("query, profile and the confirmation handoff") {
    workspace w;
    REQUIRE(w.deliver("B1", 4).code == 0);
    const auto count = w.run({"query", "--count", "--filter", "batch_id=B1"});
    CHECK(count.code == 0);
    const auto rows = w.run({"query", "--filter", "batch_id=B1"});
    std::size_t lines = 0;
    std::istringstream in(rows.out);
    for (std::string line; std::getline(in, line); ++lines) CHECK(nlohmann::json::parse(line)["batch_id"] == "B1");
    CHECK(std::to_string(lines) + "\n" == count.out);
    CHECK(w.run({"query", "--limit", "3"}).out.find('\n') != std::string::npos);

    const auto quality = w.run({"profile", "--batch", "B1"});
    CHECK(quality.out == vision::read_text(w.dir / "landing" / "B1" / "_reports" / "B1.quality.json"));
    CHECK(nlohmann::json::parse(w.run({"profile"}).out)["catalog_entries"] == lines);

    CHECK(w.run({"ingest", "--batch", "B1", "--request-retransfer"}).code == 1);
    CHECK(w.run({"ingest", "--batch", "B1", "--confirm"}).code == 0);
    CHECK(fs::exists(w.dir / "staging" / "B1"));
    const auto handoff = w.run({"transfer", "--delete-confirmed"});
    CHECK(handoff.code == 0);
    CHECK(nlohmann::json::parse(handoff.out).size() == 1);
    CHECK_FALSE(fs::exists(w.dir / "staging" / "B1"));
}

TEST_CASE("mutating commands respect the landing lock") {
    workspace w;
    REQUIRE(w.run({"--seed", "5", "generate", "--batch", "B1", "--studies", "1"}).code == 0);
    REQUIRE(w.run({"transfer", "--batch", "B1"}).code == 0);
    fs::create_directories(w.dir / "landing");
    {
        vision::ingest::landing_lock held(w.dir / "landing");
        const auto r = w.run({"ingest", "--batch", "B1"});
        CHECK(r.code == 1);
        CHECK(r.err.find("LOCK_HELD") != std::string::npos);
        CHECK(w.run({"query", "--count"}).code == 0);
    }
    CHECK(w.run({"ingest", "--batch", "B1"}).code == 0);
}

TEST_CASE("bench reports a rate") {
    workspace w;
    const auto r = w.run({"bench", "--files", "200", "--dir", (w.dir / "bench").string()});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["files"] == 200);
    CHECK(j["corrupt"] == 0);
    CHECK(j["files_per_second"].get<double>() > 0);
    CHECK(w.run({"bench", "--files", "200", "--dir", (w.dir / "bench").string()}).code == 2);
    CHECK(w.run({"bench", "--files", "50", "--min-rate", "1e12"}).code == 1);
}
