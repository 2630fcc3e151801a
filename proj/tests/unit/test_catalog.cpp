#include <doctest.h>

#include "support.hpp"
#include "vision/catalog/catalog.hpp"
#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <set>
#include <thread>

using namespace vision::catalog;
using vision::dicom::scan_status;

namespace {

auto entry(int i, const std::string& batch = "B1", const std::string& modality = "CR") -> catalog_entry {
    catalog_entry e;
    e.header.sop_uid = "2.25.7." + std::to_string(i);
    e.header.study_uid = "2.25.7";
    e.header.accession_number = "ACC" + std::to_string(1000 + i / 8);
    e.header.modality = modality;
    e.header.manufacturer = i % 2 ? "ACME" : "GLOBEX";
    e.header.study_date = "2019010" + std::to_string(1 + i % 9);
    e.header.file_path = "s/" + std::to_string(i) + ".dcm";
    e.header.file_size = 100 + i;
    e.header.parse_status = scan_status::modern;
    e.digest = std::string(63, 'a') + "0";
    e.batch_id = batch;
    e.ingested_at = "2020-01-06T08:00:00Z";
    return e;
}

auto entries(int n, const std::string& batch = "B1") {
    std::vector<catalog_entry> out;
    for (int i = 0; i < n; ++i) out.push_back(entry(i, batch));
    return out;
}

auto dump(const std::vector<catalog_entry>& es) -> std::string { return nlohmann::json(es).dump(); }

auto row(const std::string& patient, const std::string& acc) -> clinical_snapshot_row {
    return {patient, acc, {1950, "F", "V001"}, "20190101", "IMPRESSION: normal"};
}

}  // namespace

TEST_CASE("clinical snapshot round trips and rejects repeated keys") {
    const std::vector<clinical_snapshot_row> rows{row("P0000001", "ACC1000"), row("P0000002", "ACC1001")};
    const auto text = serialize_clinical_snapshot(rows);
    CHECK(text.rfind(std::string(clinical_columns) + "\n", 0) == 0);
    CHECK(parse_clinical_snapshot(text) == rows);
    CHECK_THROWS_AS((void)parse_clinical_snapshot(text + "P0000001\tACC1000\t1950\tF\tV001\t20190101\tx\n"),
                    vision::error);
    CHECK_THROWS_AS((void)parse_clinical_snapshot("a\tb\tc\n"), vision::error);
}

TEST_CASE("upsert counts: fresh, repeated, conflicting") {
    vision::testing::temp_dir dir;
    auto cat = catalog::open(dir.path());
    const auto batch = entries(80);
    CHECK(cat.upsert_entries(batch, "B1") == upsert_counts{80, 0, 0});
    CHECK(cat.upsert_entries(batch, "B1") == upsert_counts{0, 80, 0});

    auto flipped = batch[5];
    flipped.digest = std::string(63, 'a') + "1";
    CHECK(cat.upsert_entries(std::vector{flipped}, "B2") == upsert_counts{0, 0, 1});
    const auto* stored = cat.view().find(flipped.key());
    REQUIRE(stored != nullptr);
    CHECK(stored->link == link_status::ambiguous);
    CHECK(stored->audit_digests == std::vector<std::string>{batch[5].digest, flipped.digest});
    CHECK(stored->digest == batch[5].digest);

    CHECK(cat.upsert_entries(std::vector{flipped}, "B2") == upsert_counts{0, 1, 0});
}

TEST_CASE("reopen yields byte-identical query results and index") {
    vision::testing::temp_dir dir;
    std::string before;
    std::string index_before;
    {
        auto cat = catalog::open(dir.path());
        (void)cat.upsert_entries(entries(40, "B1"), "B1");
        auto second = entries(60, "B2");
        for (auto& e : second) e.header.sop_uid += ".2";
        (void)cat.upsert_entries(second, "B2");
        before = dump(cat.view().all());
        index_before = vision::read_text(cat.index_path());
    }
    auto cat = catalog::open(dir.path());
    CHECK(dump(cat.view().all()) == before);
    CHECK(cat.view().size() == 100);

    std::filesystem::remove(cat.index_path());
    auto rebuilt = catalog::open(dir.path());
    CHECK(vision::read_text(rebuilt.index_path()) == index_before);
    CHECK(build_index_text(rebuilt.log_path()) == index_before);
}

TEST_CASE("uncommitted log tail is invisible and truncated") {
    vision::testing::temp_dir dir;
    std::uintmax_t committed = 0;
    {
        auto cat = catalog::open(dir.path());
        (void)cat.upsert_entries(entries(10), "B1");
        committed = std::filesystem::file_size(cat.log_path());
        std::ofstream out(cat.log_path(), std::ios::app | std::ios::binary);
        auto extra = entry(99);
        extra.header.sop_uid = "2.25.99";
        out << nlohmann::json(extra).dump() << "\n" << "{\"partial";
    }
    auto cat = catalog::open(dir.path());
    CHECK(cat.view().size() == 10);
    CHECK(cat.view().find("2.25.99") == nullptr);
    CHECK(std::filesystem::file_size(cat.log_path()) == committed);
}

TEST_CASE("query filters exactly and rejects unknown fields") {
    vision::testing::temp_dir dir;
    auto cat = catalog::open(dir.path());
    auto es = entries(30);
    for (int i = 0; i < 10; ++i) es[i].header.modality = "MR";
    es[3].header.parse_status = scan_status::legacy;
    (void)cat.upsert_entries(es, "B1");

    CHECK(cat.view().query(catalog_filter::from_pairs({{"modality", "MR"}})).size() == 10);
    CHECK(cat.view().query(catalog_filter::from_pairs({{"parse_status", "LEGACY"}})).size() == 1);
    CHECK(cat.view().query({}).size() == 30);

    try {
        (void)catalog_filter::from_pairs({{"colour", "red"}});
        FAIL("expected an error");
    } catch (const vision::error& e) {
        CHECK(e.code() == vision::error_code::unknown_filter_field);
        const std::string what = e.what();
        for (const auto& f : catalog_filter::field_names()) CHECK(what.find(f) != std::string::npos);
    }
    CHECK_THROWS_AS((void)catalog_filter::from_pairs({{"parse_status", "FINE"}}), vision::error);
}

TEST_CASE("property: query equals a brute-force filter over the full export") {
    vision::testing::temp_dir dir;
    auto cat = catalog::open(dir.path());
    std::mt19937_64 rng(11);
    const std::vector<std::string> modalities{"CR", "MR", "CT"};
    const std::vector<std::string> makers{"ACME", "GLOBEX", "INITECH"};
    const std::vector<std::string> batches{"B1", "B2", "B3", "B4"};
    for (const auto& b : batches) {
        std::vector<catalog_entry> es;
        for (int i = 0; i < 2500; ++i) {
            auto e = entry(i, b, modalities[rng() % 3]);
            e.header.sop_uid = "2.25." + std::to_string(rng() % 1000) + "." + b + "." + std::to_string(i);
            e.header.study_uid = "2.25." + std::to_string(rng() % 50);
            e.header.manufacturer = makers[rng() % 3];
            e.header.study_date = std::to_string(20100101 + rng() % 20000);
            e.header.parse_status = static_cast<scan_status>(rng() % 3);
            e.link = static_cast<link_status>(rng() % 3);
            es.push_back(std::move(e));
        }
        (void)cat.upsert_entries(es, b);
    }
    const auto all = cat.view().all();
    REQUIRE(all.size() == 10000);

    for (int trial = 0; trial < 60; ++trial) {
        std::map<std::string, std::string> pairs;
        if (rng() % 2) pairs["modality"] = modalities[rng() % 3];
        if (rng() % 2) pairs["manufacturer"] = makers[rng() % 3];
        if (rng() % 3 == 0) pairs["study_date_from"] = std::to_string(20100101 + rng() % 20000);
        if (rng() % 3 == 0) pairs["study_date_to"] = std::to_string(20100101 + rng() % 20000);
        if (rng() % 3 == 0) pairs["parse_status"] = std::string(to_string(static_cast<scan_status>(rng() % 3)));
        if (rng() % 3 == 0) pairs["link_status"] = std::string(to_string(static_cast<link_status>(rng() % 3)));
        if (rng() % 3 == 0) pairs["batch_id"] = batches[rng() % 4];

        std::vector<catalog_entry> expected;
        for (const auto& e : all) {
            bool keep = true;
            for (const auto& [field, value] : pairs) {
                if (field == "modality") keep &= e.header.modality == value;
                if (field == "manufacturer") keep &= e.header.manufacturer == value;
                if (field == "study_date_from") keep &= e.header.study_date >= value;
                if (field == "study_date_to") keep &= e.header.study_date <= value;
                if (field == "parse_status") keep &= to_string(e.header.parse_status) == value;
                if (field == "link_status") keep &= to_string(e.link) == value;
                if (field == "batch_id") keep &= e.batch_id == value;
            }
            if (keep) expected.push_back(e);
        }
        REQUIRE(dump(cat.view().query(catalog_filter::from_pairs(pairs))) == dump(expected));
    }
}

TEST_CASE("link_clinical joins on normalized accession") {
    vision::manifest::accession_normalizer plain{{}};
    auto es = entries(16);  // accessions ACC1000, ACC1001
    std::vector<clinical_snapshot_row> snapshot{row("P1", "ACC1000"), row("P2", "ACC1001")};

    SUBCASE("all linked") {
        const auto r = link_clinical(es, snapshot, plain);
        CHECK(r.linked == 16);
        CHECK(r.orphan_images.empty());
        CHECK(r.orphan_rows.empty());
        for (const auto& e : es) CHECK(e.link == link_status::linked);
    }
    SUBCASE("row with no received image") {
        snapshot.push_back(row("P3", "ACC1002"));
        const auto r = link_clinical(es, snapshot, plain);
        CHECK(r.orphan_rows == std::vector<std::string>{"ACC1002"});
    }
    SUBCASE("prefixed accession needs a rule") {
        for (int i = 0; i < 8; ++i) es[i].header.accession_number = "ZZ-ACC1000";
        const auto without = link_clinical(es, snapshot, plain);
        CHECK(without.orphan_images.size() == 8);
        CHECK(without.orphan_rows == std::vector<std::string>{"ACC1000"});
        CHECK(es[0].link == link_status::orphan_image);

        vision::manifest::normalization_rules rules;
        rules.strip_prefixes = {"ZZ-"};
        const auto with = link_clinical(es, snapshot, vision::manifest::accession_normalizer{rules});
        CHECK(with.linked == 16);
        CHECK(es[0].link == link_status::linked);
    }
    SUBCASE("two patients on one accession and corrupt files") {
        snapshot.push_back(row("P9", "ACC1000"));
        es[9].header = {};
        es[9].header.file_path = "s/9.dcm";
        es[9].header.parse_status = scan_status::corrupt;
        const auto r = link_clinical(es, snapshot, plain);
        CHECK(es[0].link == link_status::ambiguous);
        CHECK(es[9].link == link_status::orphan_image);
        CHECK(r.orphan_images == std::vector<std::string>{"path:B1/s/9.dcm"});
        CHECK(r.linked == 7);
    }
}

TEST_CASE("property: linked entries reference the snapshot and never appear as orphans") {
    std::mt19937_64 rng(5);
    vision::manifest::normalization_rules rules;
    rules.strip_prefixes = {"ZZ-"};
    const vision::manifest::accession_normalizer norm{rules};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<catalog_entry> es;
        const int n = 1 + static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i) {
            auto e = entry(i);
            e.header.accession_number = (rng() % 4 == 0 ? "ZZ-ACC" : "ACC") + std::to_string(rng() % 8);
            if (rng() % 10 == 0) e.header.parse_status = scan_status::corrupt;
            es.push_back(std::move(e));
        }
        std::vector<clinical_snapshot_row> snapshot;
        for (int a = 0; a < 8; ++a) {
            if (rng() % 2) snapshot.push_back(row("P" + std::to_string(a), "ACC" + std::to_string(a)));
        }
        const auto r = link_clinical(es, snapshot, norm);
        std::set<std::string> snapshot_accs;
        for (const auto& s : snapshot) snapshot_accs.insert(s.accession_number);
        std::set<std::string> orphan_images(r.orphan_images.begin(), r.orphan_images.end());
        std::size_t linked = 0;
        for (const auto& e : es) {
            if (e.link != link_status::linked) continue;
            ++linked;
            REQUIRE(snapshot_accs.contains(norm.normalize(e.header.accession_number).normalized));
            REQUIRE_FALSE(orphan_images.contains(e.key()));
            REQUIRE(std::find(r.orphan_rows.begin(), r.orphan_rows.end(),
                              norm.normalize(e.header.accession_number).normalized) == r.orphan_rows.end());
        }
        REQUIRE(linked == r.linked);
        REQUIRE(linked + orphan_images.size() == es.size());
    }
}

TEST_CASE("concurrent readers never observe a partial batch") {
    vision::testing::temp_dir dir;
    auto cat = catalog::open(dir.path());
    constexpr int batch_size = 25;
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::atomic<long> reads{0};
    std::vector<std::thread> readers;
    for (int r = 0; r < 3; ++r) {
        readers.emplace_back([&] {
            while (!done.load()) {
                const auto v = cat.view();
                if (v.size() % batch_size != 0) ++bad;
                if (v.all().size() != v.size()) ++bad;
                ++reads;
            }
        });
    }
    for (int b = 0; b < 20; ++b) {
        auto es = entries(batch_size, "B" + std::to_string(b));
        for (auto& e : es) e.header.sop_uid += "." + std::to_string(b);
        (void)cat.upsert_entries(es, "B" + std::to_string(b));
    }
    done = true;
    for (auto& t : readers) t.join();
    CHECK(bad.load() == 0);
    CHECK(reads.load() > 0);
    CHECK(cat.view().size() == 20 * batch_size);
}
