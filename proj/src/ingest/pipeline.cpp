/**
 * @file pipeline.cpp
 */

#include "vision/ingest/pipeline.hpp"

#include "vision/common/config.hpp"
#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"
#include "vision/common/json.hpp"
#include "vision/common/layout.hpp"
#include "vision/common/parallel.hpp"
#include "vision/integrity/sha256.hpp"
#include "vision/integrity/snapshot.hpp"
#include "vision/manifest/manifest.hpp"

#include <set>

namespace vision::ingest {

namespace fs = std::filesystem;

namespace {

constexpr const char* clinical_suffix = ".clinical_snapshot.tsv";

template <typename T>
auto load_report(const landing_paths& paths, const std::string& id, const std::string& name) -> T {
    return nlohmann::json::parse(read_text(paths.report(id, name))).get<T>();
}

template <typename T>
void save_report(const landing_paths& paths, batch_record& record, const std::string& name, const T& value) {
    write_text_atomic(paths.report(record.batch_id, name), canonical_json(value));
    record.reports[name] = landing_paths::report_relative(record.batch_id, name);
}

/// Manifest pair if present and valid; the parse error otherwise.
auto read_manifests(const fs::path& dir)
    -> std::pair<std::optional<manifest::batch_manifest_pair>, std::optional<std::string>> {
    try {
        return {manifest::load_manifests(dir), std::nullopt};
    } catch (const error& e) {
        if (e.code() != error_code::manifest_invalid) throw;
        return {std::nullopt, std::string(e.what())};
    }
}

}  // namespace

auto ingest_options::from_config(const config& cfg) -> ingest_options {
    ingest_options o;
    o.policy = acceptance_policy::from_config(cfg);
    o.rules = manifest::normalization_rules::from_config(cfg);
    o.workers = cfg.get_u64("ingest.workers", 0);
    return o;
}

auto scan_batch_files(const fs::path& root, const std::vector<std::string>& relative_paths, std::size_t workers)
    -> std::vector<dicom::file_scan> {
    std::vector<dicom::file_scan> scans(relative_paths.size());
    parallel_for(relative_paths.size(), workers == 0 ? default_worker_count() : workers,
                 [&](std::size_t i) { scans[i] = dicom::scan_path(root / relative_paths[i], relative_paths[i]); });
    return scans;
}

ingest_service::ingest_service(fs::path landing, ingest_options options)
    : paths_{std::move(landing)},
      options_(std::move(options)),
      normalizer_(options_.rules),
      catalog_(catalog::catalog::open(paths_.catalog_dir())) {
    options_.policy.validate();
    if (!options_.clock) options_.clock = now_utc;
}

auto read_record(const landing_paths& paths, const std::string& batch_id) -> std::optional<batch_record> {
    if (!layout::is_valid_batch_id(batch_id)) return std::nullopt;
    const auto path = paths.record(batch_id);
    if (!fs::exists(path)) return std::nullopt;
    return nlohmann::json::parse(read_text(path)).get<batch_record>();
}

auto read_records(const landing_paths& paths) -> std::vector<batch_record> {
    std::vector<batch_record> out;
    if (!fs::exists(paths.root)) return out;
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(paths.root)) {
        const auto name = e.path().filename().string();
        if (e.is_directory() && layout::is_valid_batch_id(name) && fs::exists(paths.record(name))) {
            ids.push_back(name);
        }
    }
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) out.push_back(*read_record(paths, id));
    return out;
}

auto ingest_service::load_record(const std::string& batch_id) const -> std::optional<batch_record> {
    return read_record(paths_, batch_id);
}

auto ingest_service::require_record(const std::string& batch_id) const -> batch_record {
    auto record = load_record(batch_id);
    if (!record) throw error(error_code::not_found, "unknown batch " + batch_id);
    return *record;
}

void ingest_service::save_record(const batch_record& record) const {
    write_text_atomic(paths_.record(record.batch_id), canonical_json(record));
}

auto ingest_service::list_records() const -> std::vector<batch_record> { return read_records(paths_); }

auto ingest_service::refresh_corpus() -> profiler::corpus_stats {
    const auto records = list_records();
    auto stats = profiler::profile_corpus(catalog_.view(), records);
    write_text_atomic(paths_.corpus_report(), profiler::serialize(stats));
    return stats;
}

auto ingest_service::receive_batch(const fs::path& inbox, const std::string& batch_id) -> batch_record {
    std::lock_guard lock(mutex_);
    if (!layout::is_valid_batch_id(batch_id)) {
        throw error(error_code::invalid_argument, "invalid batch id '" + batch_id + "'");
    }
    const auto target = paths_.batch_dir(batch_id);
    if (fs::exists(paths_.record(batch_id))) {
        throw error(error_code::duplicate_batch, "batch " + batch_id + " was already received");
    }
    if (!fs::exists(target)) {
        const auto source = inbox / batch_id;
        if (!fs::is_directory(source)) throw error(error_code::not_found, "no batch at " + source.string());
        fs::create_directories(paths_.root);
        std::error_code ec;
        fs::rename(source, target, ec);
        if (ec) {
            // Different filesystems: copy, then drop the inbox copy.
            const auto partial = paths_.root / ("." + batch_id + ".partial");
            fs::remove_all(partial);
            fs::copy(source, partial, fs::copy_options::recursive);
            fs::rename(partial, target);
            fs::remove_all(source);
        }
    }
    // A landing directory without a record is an interrupted receipt; finish it.
    batch_record record;
    record.batch_id = batch_id;
    record.state = batch_state::received;
    record.received_at = options_.clock();
    save_record(record);
    return record;
}

auto ingest_service::run_pipeline(const std::string& batch_id, const run_options& run) -> batch_record {
    std::lock_guard lock(mutex_);
    auto record = require_record(batch_id);
    const std::set<batch_state> finished{batch_state::verified, batch_state::unverified, batch_state::rejected,
                                         batch_state::confirmed};
    while (!finished.contains(record.state)) {
        const auto before = record;
        try {
            step(record);
        } catch (const std::exception& e) {
            auto parked = before;
            parked.error_detail = e.what();
            save_record(parked);
            throw;
        }
        record.error_detail.reset();
        save_record(record);
        if (finished.contains(record.state)) refresh_corpus();
        if (run.stop_after && record.state == *run.stop_after) break;
    }
    return record;
}

void ingest_service::step(batch_record& record) {
    const auto& id = record.batch_id;
    const auto dir = paths_.batch_dir(id);
    const auto workers = options_.workers == 0 ? default_worker_count() : options_.workers;

    switch (record.state) {
        case batch_state::received: {
            const auto snapshot = integrity::snapshot_batch(dir, id, options_.clock(), workers);
            integrity::save_snapshot(snapshot, dir);
            record.reports["snapshot"] = std::string(layout::snapshot_file);
            advance(record, batch_state::hashed, options_.clock(), "hash");
            return;
        }
        case batch_state::hashed: {
            const auto snapshot = integrity::load_snapshot(dir);
            std::vector<std::string> paths;
            for (const auto& e : snapshot.entries) paths.push_back(e.path);
            const auto scans = scan_batch_files(dir, paths, workers);
            std::vector<dicom::header_record> headers;
            for (const auto& s : scans) headers.push_back(s.header);

            const auto [pair, manifest_error] = read_manifests(dir);
            const auto dups = detect_duplicates(headers, catalog_.view(), id, normalizer_);
            const auto report = manifest::reconcile(pair, snapshot, headers, {id, options_.rules, dups.dup_studies});

            record.counts = {};
            std::set<std::string> studies;
            for (const auto& h : headers) {
                ++record.counts.files;
                record.counts.bytes += h.file_size;
                switch (h.parse_status) {
                    case dicom::scan_status::modern: ++record.counts.modern; break;
                    case dicom::scan_status::legacy: ++record.counts.legacy; break;
                    case dicom::scan_status::corrupt: ++record.counts.corrupt; break;
                }
                if (h.parse_status != dicom::scan_status::corrupt) studies.insert(h.study_uid);
            }
            record.counts.studies = studies.size();
            record.manifest_present = report.manifest_present;

            save_report(paths_, record, "scan", scans);
            save_report(paths_, record, "duplicates", dups);
            save_report(paths_, record, "reconciliation", report);
            advance(record, batch_state::reconciled, options_.clock(), "reconcile");
            return;
        }
        case batch_state::reconciled: {
            const auto report = load_report<manifest::reconciliation_report>(paths_, id, "reconciliation");
            const auto manifest_error = read_manifests(dir).second;
            const auto reason = evaluate(options_.policy,
                                         {record.counts.files, record.counts.corrupt, &report, manifest_error});
            if (!reason) {
                advance(record, batch_state::scanned, options_.clock(), "accept");
                return;
            }
            const auto scans = load_report<std::vector<dicom::file_scan>>(paths_, id, "scan");
            const auto dups = load_report<duplicate_report>(paths_, id, "duplicates");
            save_report(paths_, record, "quality", profiler::profile_batch(record, scans, {report, dups, std::nullopt}));
            record.rejection_reason = *reason;
            advance(record, batch_state::rejected, options_.clock(), "reject-by-policy");
            return;
        }
        case batch_state::scanned: {
            const auto snapshot = integrity::load_snapshot(dir);
            const auto scans = load_report<std::vector<dicom::file_scan>>(paths_, id, "scan");
            const auto ingested_at = options_.clock();
            std::vector<catalog::catalog_entry> entries;
            for (const auto& s : scans) {
                catalog::catalog_entry e;
                e.header = s.header;
                const auto* snap = snapshot.find(s.header.file_path);
                if (snap == nullptr) {
                    throw error(error_code::io_error, "snapshot lacks scanned file " + s.header.file_path);
                }
                e.digest = snap->digest;
                e.batch_id = id;
                e.ingested_at = ingested_at;
                entries.push_back(std::move(e));
            }
            std::vector<catalog::clinical_snapshot_row> rows;
            if (options_.clinical_dir) {
                rows = catalog::load_clinical_snapshot(*options_.clinical_dir / (id + clinical_suffix));
            }
            const auto link = catalog::link_clinical(entries, rows, normalizer_);
            save_report(paths_, record, "link", link);
            (void)catalog_.upsert_entries(entries, id);
            advance(record, batch_state::cataloged, options_.clock(), "catalog");
            return;
        }
        case batch_state::cataloged: {
            const auto scans = load_report<std::vector<dicom::file_scan>>(paths_, id, "scan");
            const auto report = load_report<manifest::reconciliation_report>(paths_, id, "reconciliation");
            const auto dups = load_report<duplicate_report>(paths_, id, "duplicates");
            const auto link = load_report<catalog::link_report>(paths_, id, "link");
            save_report(paths_, record, "quality", profiler::profile_batch(record, scans, {report, dups, link}));
            advance(record, batch_state::profiled, options_.clock(), "profile");
            return;
        }
        case batch_state::profiled:
            advance(record, record.manifest_present ? batch_state::verified : batch_state::unverified,
                    options_.clock(), record.manifest_present ? "verify" : "mark-unverified");
            return;
        default:
            return;
    }
}

auto ingest_service::confirm_receipt(const std::string& batch_id) -> confirmation_event {
    std::lock_guard lock(mutex_);
    auto record = require_record(batch_id);
    if (record.state == batch_state::confirmed && record.confirmation) return *record.confirmation;
    if (record.state != batch_state::verified && record.state != batch_state::unverified) {
        throw error(error_code::illegal_transition, "batch " + batch_id + " cannot be confirmed in state " +
                                                        std::string(to_string(record.state)));
    }
    confirmation_event event;
    event.batch_id = batch_id;
    event.confirmed_at = options_.clock();
    event.snapshot_digest =
        integrity::hash_text(read_text(paths_.batch_dir(batch_id) / std::string(layout::snapshot_file)));
    advance(record, batch_state::confirmed, event.confirmed_at, "confirm");
    record.confirmation = event;
    save_record(record);
    refresh_corpus();
    return event;
}

auto ingest_service::reject_batch(const std::string& batch_id, const std::string& reason) -> batch_record {
    std::lock_guard lock(mutex_);
    if (reason.empty()) throw error(error_code::invalid_argument, "a rejection needs a reason");
    auto record = require_record(batch_id);
    if (record.state == batch_state::rejected) return record;
    // The policy gate owns RECONCILED -> REJECTED; operators act only on finished batches.
    if (record.state != batch_state::verified && record.state != batch_state::unverified) {
        throw error(error_code::illegal_transition, "batch " + batch_id + " cannot be rejected in state " +
                                                        std::string(to_string(record.state)));
    }
    advance(record, batch_state::rejected, options_.clock(), "operator-reject");
    record.rejection_reason = "operator: " + reason;
    save_record(record);
    refresh_corpus();
    return record;
}

auto ingest_service::request_retransfer(const std::string& batch_id) -> batch_record {
    std::lock_guard lock(mutex_);
    auto record = require_record(batch_id);
    if (record.state != batch_state::rejected) {
        throw error(error_code::illegal_transition, "batch " + batch_id + " is " +
                                                        std::string(to_string(record.state)) +
                                                        "; retransfer can only be requested for a REJECTED batch");
    }
    record.retransfer_requested = true;
    save_record(record);
    return record;
}

}  // namespace vision::ingest
