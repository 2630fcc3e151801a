#include <doctest.h>

#include "support.hpp"
#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"
#include "vision/common/layout.hpp"
#include "vision/manifest/accession.hpp"
#include "vision/manifest/manifest.hpp"
#include "vision/manifest/reconcile.hpp"

#include <random>

using namespace vision::manifest;
using vision::dicom::header_record;
using vision::dicom::scan_status;
using vision::integrity::hash_snapshot;
using vision::integrity::snapshot_entry;

namespace {

const std::string d1(64, 'a');
const std::string d2(64, 'b');
const std::string d3(64, 'c');

auto study_text(const std::string& rows) { return "#vision-manifest v1\n" + rows; }

auto minimal_pair() -> batch_manifest_pair {
    return parse_manifests(study_text("ACC0001\t2.25.1\tCR\t2\n"),
                           study_text("s/1.dcm\t2.25.1.1\tACC0001\t10\t" + d1 + "\n" +
                                      "s/2.dcm\t2.25.1.2\tACC0001\t12\t" + d2 + "\n"));
}

auto header(const std::string& path, const std::string& sop, const std::string& acc = "ACC0001",
            const std::string& study = "2.25.1") -> header_record {
    header_record h;
    h.file_path = path;
    h.sop_uid = sop;
    h.accession_number = acc;
    h.study_uid = study;
    h.parse_status = scan_status::modern;
    return h;
}

struct fixture {
    batch_manifest_pair pair = minimal_pair();
    hash_snapshot snapshot{"B1", "t", {{"s/1.dcm", 10, d1}, {"s/2.dcm", 12, d2}}};
    std::vector<header_record> headers{header("s/1.dcm", "2.25.1.1"), header("s/2.dcm", "2.25.1.2")};
    reconcile_context ctx{"B1", {}, {}};
};

}  // namespace

TEST_CASE("parse_manifests accepts a minimal consistent pair") {
    const auto pair = minimal_pair();
    REQUIRE(pair.studies.size() == 1);
    CHECK(pair.studies[0].expected_file_count == 2);
    REQUIRE(pair.files.size() == 2);
    CHECK(pair.files[1].size == 12);
    CHECK(parse_manifests(serialize_studies(pair), serialize_files(pair)) == pair);
}

TEST_CASE("parse_manifests reports structural errors with locations") {
    auto message = [](const std::string& s, const std::string& f) {
        try {
            (void)parse_manifests(s, f);
        } catch (const vision::error& e) {
            CHECK(e.code() == vision::error_code::manifest_invalid);
            return std::string(e.what());
        }
        return std::string("no error");
    };
    const auto files_ok = study_text("a\t1\tACC0001\t1\t" + d1 + "\n");
    CHECK(message(study_text("ACC0001\t2.25.1\tCR\n"), files_ok).find("studies.manifest.tsv:2") != std::string::npos);
    CHECK(message(study_text("ACC0001\t2.25.1\tCR\ttwo\n"), files_ok).find("expected_file_count") != std::string::npos);
    CHECK(message(study_text("ACC0001\t2.25.1\tCR\t1\n"), study_text("a\t1\tACC0001\tx\t" + d1 + "\n"))
              .find("files.manifest.tsv:2") != std::string::npos);
    CHECK(message(study_text("ACC0001\t2.25.1\tCR\t1\n"), study_text("a\t1\tACC0001\t1\tXYZ\n")).find("digest") !=
          std::string::npos);
    CHECK(message("ACC0001\t2.25.1\tCR\t1\n", files_ok).find("header") != std::string::npos);
    CHECK(message(study_text("ACC0001\t2.25.1\tCR\t1\n"), study_text("a\t1\tACC0999\t1\t" + d1 + "\n"))
              .find("ACC0999") != std::string::npos);
    CHECK(message(study_text("ACC0001\t2.25.1\tCR\t2\n"),
                  study_text("a\t9.9\tACC0001\t1\t" + d1 + "\nb\t9.9\tACC0001\t1\t" + d2 + "\n"))
              .find("9.9") != std::string::npos);
    CHECK(message(study_text("ACC0001\t2.25.1\tCR\t3\n"), files_ok).find("expects 3") != std::string::npos);
}

TEST_CASE("load_manifests distinguishes absent from incomplete") {
    vision::testing::temp_dir dir;
    CHECK_FALSE(load_manifests(dir.path()).has_value());
    save_manifests(minimal_pair(), dir.path());
    CHECK(load_manifests(dir.path()) == minimal_pair());
    std::filesystem::remove(dir / std::string(vision::layout::files_manifest));
    CHECK_THROWS_AS((void)load_manifests(dir.path()), vision::error);
}

TEST_CASE("normalize_accession applies prefix rules and the canonical pattern") {
    normalization_rules rules;
    rules.strip_prefixes = {"ZZ-"};
    const auto a = normalize_accession("ZZ-ACC0001", rules);
    CHECK(a.normalized == "ACC0001");
    CHECK(a.violations.empty());

    const auto b = normalize_accession("ACC0001", normalization_rules{});
    CHECK(b.normalized == "ACC0001");
    CHECK(b.violations.empty());

    const auto c = normalize_accession("acc 0001", normalization_rules{});
    CHECK(c.normalized == "ACC 0001");
    CHECK(c.violations.size() == 1);

    CHECK_FALSE(normalize_accession("ZZ-ACC0001", normalization_rules{}).violations.empty());
    CHECK_THROWS_AS((void)normalize_accession("x", normalization_rules{{"("}, "[A-Z]+", true}), vision::error);
}

TEST_CASE("property: normalize_accession is idempotent") {
    normalization_rules rules;
    rules.strip_prefixes = {"ZZ-", "[0-9]{2}_", "x"};
    std::mt19937_64 rng(3);
    const std::string alphabet = "ZZ-_x0123456789ACacz ";
    for (int i = 0; i < 2000; ++i) {
        std::string raw;
        const auto len = rng() % 18;
        for (std::size_t k = 0; k < len; ++k) raw.push_back(alphabet[rng() % alphabet.size()]);
        const auto once = normalize_accession(raw, rules).normalized;
        REQUIRE(normalize_accession(once, rules).normalized == once);
    }
}

TEST_CASE("reconcile: consistent batch is clean") {
    fixture f;
    const auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
    CHECK(r.clean());
    CHECK(r.batch_id == "B1");
}

TEST_CASE("reconcile: a manifest row without a file is missing and nothing else") {
    fixture f;
    f.snapshot.entries.erase(f.snapshot.entries.begin() + 1);
    f.headers.pop_back();
    const auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
    CHECK(r.missing_files == std::vector<std::string>{"s/2.dcm"});
    CHECK(r.unexpected_files.empty());
    CHECK(r.digest_mismatches.empty());
    CHECK(r.duplicate_sop_uids.empty());
    CHECK(r.study_count_deltas.empty());
    CHECK(r.accession_format_violations.empty());
}

TEST_CASE("reconcile: absent manifest is not incomplete") {
    fixture f;
    const auto r = reconcile(std::nullopt, f.snapshot, f.headers, f.ctx);
    CHECK_FALSE(r.manifest_present);
    CHECK_FALSE(r.clean());
    CHECK(r.missing_files.empty());
    CHECK(r.unexpected_files.empty());
    CHECK(r.digest_mismatches.empty());
}

TEST_CASE("reconcile: duplicated file under a new path is a duplicate SOP UID") {
    fixture f;
    f.snapshot.entries.push_back({"s/2_copy.dcm", 12, d2});
    f.headers.push_back(header("s/2_copy.dcm", "2.25.1.2"));
    const auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
    CHECK(r.duplicate_sop_uids == std::vector<std::string>{"2.25.1.2"});
    CHECK(r.unexpected_files == std::vector<std::string>{"s/2_copy.dcm"});
    CHECK(r.missing_files.empty());
}

TEST_CASE("reconcile: unlisted file, digest mismatch, duplicate accessions") {
    fixture f;
    SUBCASE("unlisted") {
        f.snapshot.entries.push_back({"s/9.dcm", 3, d3});
        f.headers.push_back(header("s/9.dcm", "2.25.1.9"));
        const auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
        CHECK(r.unexpected_files == std::vector<std::string>{"s/9.dcm"});
        CHECK(r.duplicate_sop_uids.empty());
    }
    SUBCASE("digest") {
        f.snapshot.entries[0].digest = d3;
        const auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
        CHECK(r.digest_mismatches == std::vector<std::string>{"s/1.dcm"});
        CHECK(r.missing_files.empty());
    }
    SUBCASE("same accession on two studies") {
        f.headers[1].study_uid = "2.25.2";
        const auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
        CHECK(r.duplicate_accessions == std::vector<std::string>{"ACC0001"});
    }
    SUBCASE("accession seen in an earlier batch") {
        f.ctx.prior_accessions = {"ACC0001"};
        const auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
        CHECK(r.duplicate_accessions == std::vector<std::string>{"ACC0001"});
    }
    SUBCASE("prefixed accession fails the canonical pattern unless a rule strips it") {
        f.pair = parse_manifests(study_text("ZZ-ACC0001\t2.25.1\tCR\t2\n"),
                                 study_text("s/1.dcm\t2.25.1.1\tZZ-ACC0001\t10\t" + d1 + "\n" +
                                            "s/2.dcm\t2.25.1.2\tZZ-ACC0001\t12\t" + d2 + "\n"));
        for (auto& h : f.headers) h.accession_number = "ZZ-ACC0001";
        auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
        CHECK(r.accession_format_violations == std::vector<std::string>{"ZZ-ACC0001"});
        f.ctx.rules.strip_prefixes = {"ZZ-"};
        r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
        CHECK(r.clean());
    }
    SUBCASE("per-study count disagreement inside the manifest pair") {
        f.pair = parse_manifests(study_text("ACC0001\t2.25.1\tCR\t1\nACC0002\t2.25.2\tCR\t1\n"),
                                 study_text("s/1.dcm\t2.25.1.1\tACC0001\t10\t" + d1 + "\n" +
                                            "s/2.dcm\t2.25.1.2\tACC0001\t12\t" + d2 + "\n"));
        const auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
        REQUIRE(r.study_count_deltas.size() == 2);
        CHECK(r.study_count_deltas.at("ACC0001") == std::pair<std::uint64_t, std::uint64_t>{1, 2});
        CHECK(r.study_count_deltas.at("ACC0002") == std::pair<std::uint64_t, std::uint64_t>{1, 0});
    }
}

TEST_CASE("reconciliation report survives a JSON round trip") {
    fixture f;
    f.snapshot.entries.erase(f.snapshot.entries.begin());
    const auto r = reconcile(f.pair, f.snapshot, f.headers, f.ctx);
    nlohmann::json j = r;
    const auto back = j.get<reconciliation_report>();
    CHECK(nlohmann::json(back) == j);
}
