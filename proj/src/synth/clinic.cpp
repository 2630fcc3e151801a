/**
 * @file clinic.cpp
 */

#include "vision/synth/clinic.hpp"

#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"
#include "vision/common/layout.hpp"
#include "vision/common/timestamp.hpp"
#include "vision/integrity/sha256.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vision::synth {

namespace fs = std::filesystem;

namespace {

auto format_seconds(double t) -> std::string { return format_utc(static_cast<std::int64_t>(std::floor(t))); }

auto all_files(const fs::path& root) -> std::vector<fs::path> {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

void to_json(nlohmann::json& j, const transfer_result& r) {
    j = nlohmann::json{{"bytes", r.bytes},
                       {"elapsed_seconds", r.elapsed},
                       {"effective_rate", r.effective_rate},
                       {"started_at", r.started_at},
                       {"finished_at", r.finished_at}};
}

void to_json(nlohmann::json& j, const deletion_record& r) {
    j = nlohmann::json{{"batch_id", r.batch_id},
                       {"accession_list", r.accession_list},
                       {"digests", r.digests},
                       {"deleted_at", r.deleted_at},
                       {"confirmation", r.confirmation}};
}

void from_json(const nlohmann::json& j, deletion_record& r) {
    j.at("batch_id").get_to(r.batch_id);
    j.at("accession_list").get_to(r.accession_list);
    j.at("digests").get_to(r.digests);
    j.at("deleted_at").get_to(r.deleted_at);
    j.at("confirmation").get_to(r.confirmation);
}

auto clinical_snapshot_path(const fs::path& clinical_dir, const std::string& batch_id) -> fs::path {
    return clinical_dir / (batch_id + ".clinical_snapshot.tsv");
}

auto valid_batch_id(const std::string& batch_id) -> bool { return layout::is_valid_batch_id(batch_id); }

clinic::clinic(fs::path staging, fs::path clinical, extraction_model model, double start)
    : staging_(std::move(staging)), clinical_(std::move(clinical)), model_(model), clock_(start) {
    model_.validate();
    const auto saved = state_dir() / "clock";
    if (fs::exists(saved)) {
        const double t = std::stod(read_text(saved));
        if (t > clock_.now()) clock_.advance_to(t);
    }
}

auto clinic::state_dir() const -> fs::path { return staging_ / "_clinic"; }

void clinic::save_clock() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f\n", clock_.now());
    write_text_atomic(state_dir() / "clock", buf);
}

auto clinic::stage(const std::string& batch_id, const std::vector<study_spec>& studies,
                   const std::vector<fault_descriptor>& faults, std::uint64_t seed, const assemble_options& options)
    -> assembled_batch {
    if (!valid_batch_id(batch_id)) throw error(error_code::invalid_argument, "invalid batch id '" + batch_id + "'");
    if (fs::exists(state_dir() / (batch_id + ".staged.json"))) {
        throw error(error_code::invalid_argument, "batch " + batch_id + " was already staged");
    }
    std::vector<std::string> accessions;
    for (const auto& s : studies) accessions.push_back(s.accession_number);
    simulate_extraction(accessions, model_, clock_);

    auto assembled = assemble_batch(batch_id, staging_ / batch_id, studies, faults, seed, clock_.timestamp(), options);
    clock_.record("staged " + batch_id);
    catalog::save_clinical_snapshot(assembled.clinical, clinical_snapshot_path(clinical_, batch_id));
    write_text_atomic(state_dir() / (batch_id + ".staged.json"), nlohmann::json(assembled.batch).dump(2) + "\n");
    save_clock();
    return assembled;
}

auto clinic::find(const std::string& batch_id) const -> std::optional<staged_batch> {
    const auto path = state_dir() / (batch_id + ".staged.json");
    if (!valid_batch_id(batch_id) || !fs::exists(path)) return std::nullopt;
    return nlohmann::json::parse(read_text(path)).get<staged_batch>();
}

auto clinic::deletion(const std::string& batch_id) const -> std::optional<deletion_record> {
    const auto path = state_dir() / (batch_id + ".deletion.json");
    if (!valid_batch_id(batch_id) || !fs::exists(path)) return std::nullopt;
    return nlohmann::json::parse(read_text(path)).get<deletion_record>();
}

auto clinic::staged_batches() const -> std::vector<staged_batch> {
    std::vector<staged_batch> out;
    if (!fs::exists(state_dir())) return out;
    std::vector<std::string> ids;
    const std::string suffix = ".staged.json";
    for (const auto& e : fs::directory_iterator(state_dir())) {
        const auto name = e.path().filename().string();
        if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) out.push_back(*find(id));
    return out;
}

auto clinic::transfer_batch(const std::string& batch_id, const fs::path& inbox, double bandwidth_cap)
    -> transfer_result {
    const auto staged = find(batch_id);
    if (!staged) throw error(error_code::not_found, "no staged batch " + batch_id);
    if (deletion(batch_id)) throw error(error_code::invalid_argument, "batch " + batch_id + " was already deleted");
    const auto source = staging_ / batch_id;
    const auto target = inbox / batch_id;
    if (fs::exists(target)) throw error(error_code::invalid_argument, "inbox already holds " + target.string());

    transfer_result r;
    for (const auto& f : all_files(source)) r.bytes += fs::file_size(f);
    const double start = clock_.now();
    r.elapsed = transfer_seconds(r.bytes, model_, bandwidth_cap, start);
    r.effective_rate = r.elapsed > 0 ? static_cast<double>(r.bytes) / r.elapsed : 0.0;
    r.started_at = format_seconds(start);

    const auto partial = inbox / ("." + batch_id + ".partial");
    std::error_code ec;
    fs::remove_all(partial, ec);
    fs::create_directories(inbox);
    fs::copy(source, partial, fs::copy_options::recursive);
    fs::rename(partial, target);

    clock_.advance_by(r.elapsed);
    clock_.record("transferred " + batch_id);
    r.finished_at = clock_.timestamp();
    save_clock();
    return r;
}

void clinic::receive_confirmation(const confirmation_event& event) {
    if (!find(event.batch_id)) throw error(error_code::not_found, "no staged batch " + event.batch_id);
    write_text_atomic(state_dir() / (event.batch_id + ".confirmation.json"), nlohmann::json(event).dump(2) + "\n");
}

auto clinic::delete_on_confirmation(const std::string& batch_id, const std::optional<confirmation_event>& event)
    -> deletion_record {
    if (auto existing = deletion(batch_id)) {
        fs::remove_all(staging_ / batch_id);
        return *existing;
    }
    const auto staged = find(batch_id);
    if (!staged) throw error(error_code::not_found, "no staged batch " + batch_id);

    std::optional<confirmation_event> confirmation = event;
    if (confirmation && confirmation->batch_id != batch_id) {
        throw error(error_code::confirmation_required,
                    "confirmation is for " + confirmation->batch_id + ", not " + batch_id);
    }
    if (confirmation) {
        receive_confirmation(*confirmation);
    } else if (const auto saved = state_dir() / (batch_id + ".confirmation.json"); fs::exists(saved)) {
        confirmation = nlohmann::json::parse(read_text(saved)).get<confirmation_event>();
    }
    if (!confirmation) {
        throw error(error_code::confirmation_required, "batch " + batch_id + " has no receipt confirmation");
    }

    deletion_record record;
    record.batch_id = batch_id;
    record.accession_list = staged->accession_list;
    record.confirmation = *confirmation;
    const auto root = staging_ / batch_id;
    if (fs::exists(root)) {
        for (const auto& f : all_files(root)) record.digests.push_back(integrity::hash_file(f).digest);
    }
    std::sort(record.digests.begin(), record.digests.end());
    record.deleted_at = clock_.timestamp();

    // Audit record first; a retry after a crash in between finishes the removal.
    write_text_atomic(state_dir() / (batch_id + ".deletion.json"), nlohmann::json(record).dump(2) + "\n");
    fs::remove_all(root);
    clock_.record("deleted " + batch_id);
    save_clock();
    return record;
}

}  // namespace vision::synth
