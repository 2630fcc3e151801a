/**
 * @file batch.cpp
 */

#include "vision/synth/batch.hpp"

#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"
#include "vision/common/layout.hpp"
#include "vision/integrity/sha256.hpp"
#include "vision/integrity/snapshot.hpp"
#include "vision/manifest/manifest.hpp"
#include "vision/dicom/parser.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace vision::synth {

namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<fault_kind, std::string_view>>& fault_names() {
    static const std::vector<std::pair<fault_kind, std::string_view>> names{
        {fault_kind::omit_manifests, "OMIT_MANIFESTS"},
        {fault_kind::drop_file, "DROP_FILE"},
        {fault_kind::duplicate_file, "DUPLICATE_FILE"},
        {fault_kind::corrupt_file, "CORRUPT_FILE"},
        {fault_kind::truncate_file, "TRUNCATE_FILE"},
        {fault_kind::strip_dicm_magic, "STRIP_DICM_MAGIC"},
        {fault_kind::prefix_accession, "PREFIX_ACCESSION"},
        {fault_kind::duplicate_accession, "DUPLICATE_ACCESSION"},
        {fault_kind::extra_unlisted_file, "EXTRA_UNLISTED_FILE"},
    };
    return names;
}

struct staged_file {
    std::string path;
    std::string sop_uid;
    std::string accession;
    std::size_t study{};
    std::size_t pixel_offset{};
    bool stripped{false};
};

/// Picks `count` distinct unused indexes from `eligible`.
auto pick(std::vector<std::size_t> eligible, std::uint32_t count, std::mt19937_64& rng, std::set<std::size_t>& used,
          fault_kind kind) -> std::vector<std::size_t> {
    eligible.erase(std::remove_if(eligible.begin(), eligible.end(), [&](auto i) { return used.contains(i); }),
                   eligible.end());
    if (eligible.size() < count) {
        throw error(error_code::invalid_argument, std::string(to_string(kind)) + " needs " + std::to_string(count) +
                                                      " targets but only " + std::to_string(eligible.size()) +
                                                      " are available");
    }
    std::vector<std::size_t> chosen;
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto at = rng() % eligible.size();
        chosen.push_back(eligible[at]);
        used.insert(eligible[at]);
        eligible.erase(eligible.begin() + static_cast<std::ptrdiff_t>(at));
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

auto clinical_row_for(const study_spec& spec, const std::string& canonical_accession, std::uint64_t seed)
    -> catalog::clinical_snapshot_row {
    std::mt19937_64 rng(mix_seed(seed, 0xC1D));
    catalog::clinical_snapshot_row row;
    row.patient_id = spec.patient_id;
    row.accession_number = canonical_accession;
    row.demographics.birth_year = static_cast<std::uint32_t>(1930 + rng() % 61);
    row.demographics.sex = rng() % 2 ? "F" : "M";
    row.demographics.site_code = "V" + std::to_string(100 + rng() % 900);
    row.study_date = spec.study_date;
    static const std::vector<std::string> impressions{"No acute cardiopulmonary process.",
                                                      "Stable appearance compared with prior.",
                                                      "Mild degenerative change. No acute finding."};
    row.report_text = "IMPRESSION: " + impressions[rng() % impressions.size()];
    return row;
}

}  // namespace

auto to_string(fault_kind k) -> std::string_view {
    for (const auto& [kind, name] : fault_names()) {
        if (kind == k) return name;
    }
    return "UNKNOWN";
}

auto all_fault_kinds() -> const std::vector<fault_kind>& {
    static const std::vector<fault_kind> kinds = [] {
        std::vector<fault_kind> out;
        for (const auto& [kind, name] : fault_names()) out.push_back(kind);
        return out;
    }();
    return kinds;
}

auto parse_fault(std::string_view text) -> fault_descriptor {
    const auto colon = text.find(':');
    const auto name = text.substr(0, colon);
    fault_descriptor out;
    bool found = false;
    for (const auto& [kind, n] : fault_names()) {
        if (n == name) {
            out.kind = kind;
            found = true;
        }
    }
    if (!found) {
        std::string valid;
        for (const auto& [kind, n] : fault_names()) valid += (valid.empty() ? "" : ", ") + std::string(n);
        throw error(error_code::unknown_fault_kind, "unknown fault kind '" + std::string(name) + "'; valid: " + valid);
    }
    if (colon != std::string_view::npos) {
        const auto digits = text.substr(colon + 1);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out.count);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || out.count == 0) {
            throw error(error_code::invalid_argument, "fault count must be a positive integer: " + std::string(text));
        }
    }
    return out;
}

void to_json(nlohmann::json& j, const staged_batch& b) {
    auto faults = nlohmann::json::array();
    for (const auto& f : b.faults_requested) {
        faults.push_back({{"kind", std::string(to_string(f.kind))}, {"count", f.count}});
    }
    auto applied = nlohmann::json::array();
    for (const auto& f : b.faults_applied) {
        applied.push_back({{"kind", std::string(to_string(f.kind))},
                           {"path", f.path},
                           {"sop_uid", f.sop_uid},
                           {"accession_number", f.accession_number}});
    }
    j = nlohmann::json{{"batch_id", b.batch_id},
                       {"root", b.root.generic_string()},
                       {"accession_list", b.accession_list},
                       {"manifests_included", b.manifests_included},
                       {"faults_requested", faults},
                       {"faults_applied", applied},
                       {"staged_at", b.staged_at},
                       {"seed", b.seed},
                       {"file_count", b.file_count},
                       {"bytes", b.bytes}};
}

void from_json(const nlohmann::json& j, staged_batch& b) {
    j.at("batch_id").get_to(b.batch_id);
    b.root = j.at("root").get<std::string>();
    j.at("accession_list").get_to(b.accession_list);
    j.at("manifests_included").get_to(b.manifests_included);
    b.faults_requested.clear();
    for (const auto& f : j.at("faults_requested")) {
        auto d = parse_fault(f.at("kind").get<std::string>());
        d.count = f.at("count").get<std::uint32_t>();
        b.faults_requested.push_back(d);
    }
    b.faults_applied.clear();
    for (const auto& f : j.at("faults_applied")) {
        applied_fault a;
        a.kind = parse_fault(f.at("kind").get<std::string>()).kind;
        f.at("path").get_to(a.path);
        f.at("sop_uid").get_to(a.sop_uid);
        f.at("accession_number").get_to(a.accession_number);
        b.faults_applied.push_back(std::move(a));
    }
    j.at("staged_at").get_to(b.staged_at);
    j.at("seed").get_to(b.seed);
    j.at("file_count").get_to(b.file_count);
    j.at("bytes").get_to(b.bytes);
}

auto assemble_batch(const std::string& batch_id, const fs::path& root, const std::vector<study_spec>& studies,
                    const std::vector<fault_descriptor>& faults, std::uint64_t seed, const std::string& staged_at,
                    const assemble_options& options) -> assembled_batch {
    if (fs::exists(root)) throw error(error_code::invalid_argument, "batch root already exists: " + root.string());
    {
        std::set<std::string> seen;
        for (const auto& s : studies) {
            validate(s);
            if (!seen.insert(s.accession_number).second) {
                throw error(error_code::invalid_argument, "accession " + s.accession_number + " repeats in the batch");
            }
        }
    }

    std::map<fault_kind, std::uint32_t> requested;
    for (const auto& f : faults) requested[f.kind] += f.count;
    std::mt19937_64 fault_rng(mix_seed(seed, 0xFA17));

    assembled_batch out;
    out.batch.batch_id = batch_id;
    out.batch.root = root;
    out.batch.faults_requested = faults;
    out.batch.staged_at = staged_at;
    out.batch.seed = seed;
    out.studies = studies;
    std::vector<std::string> canonical;
    for (const auto& s : studies) canonical.push_back(s.accession_number);
    for (std::size_t i = 0; i < studies.size(); ++i) out.study_seeds.push_back(mix_seed(seed, i));

    // Content faults reshape the specs before anything is generated.
    std::set<std::size_t> touched_studies;
    if (const auto n = requested[fault_kind::duplicate_accession]) {
        std::vector<std::size_t> later;
        for (std::size_t i = 1; i < studies.size(); ++i) later.push_back(i);
        for (const auto i : pick(later, n, fault_rng, touched_studies, fault_kind::duplicate_accession)) {
            const auto source = fault_rng() % i;
            out.studies[i].accession_number = out.studies[source].accession_number;
            out.studies[i].patient_id = out.studies[source].patient_id;
            canonical[i] = canonical[source];
            touched_studies.insert(source);
            out.batch.faults_applied.push_back(
                {fault_kind::duplicate_accession, "", "", out.studies[i].accession_number});
        }
    }
    if (const auto n = requested[fault_kind::prefix_accession]) {
        std::vector<std::size_t> all(studies.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        for (const auto i : pick(all, n, fault_rng, touched_studies, fault_kind::prefix_accession)) {
            out.studies[i].accession_number = options.accession_prefix + out.studies[i].accession_number;
            out.batch.faults_applied.push_back({fault_kind::prefix_accession, "", "", out.studies[i].accession_number});
        }
    }

    for (const auto& acc : canonical) {
        const auto& list = out.batch.accession_list;
        if (std::find(list.begin(), list.end(), acc) == list.end()) out.batch.accession_list.push_back(acc);
    }

    std::vector<staged_file> files;
    manifest::batch_manifest_pair pair;
    for (std::size_t i = 0; i < out.studies.size(); ++i) {
        const auto& spec = out.studies[i];
        const auto generated = generate_study(spec, out.study_seeds[i], options.profile);
        pair.studies.push_back({spec.accession_number, study_uid_for(out.study_seeds[i]), to_string(spec.modality),
                                spec.file_count});
        for (const auto& g : generated) {
            write_bytes(root / g.path, g.bytes);
            files.push_back({g.path, g.sop_uid, spec.accession_number, i, g.pixel_offset});
        }
    }

    std::set<std::size_t> used;
    std::vector<std::size_t> every(files.size());
    std::iota(every.begin(), every.end(), std::size_t{0});

    if (const auto n = requested[fault_kind::strip_dicm_magic]) {
        for (const auto i : pick(every, n, fault_rng, used, fault_kind::strip_dicm_magic)) {
            auto& f = files[i];
            auto bytes = read_bytes(root / f.path);
            bytes.erase(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(dicom::prefix_size));
            write_bytes(root / f.path, bytes);
            f.stripped = true;
            out.batch.faults_applied.push_back({fault_kind::strip_dicm_magic, f.path, f.sop_uid, f.accession});
        }
    }

    for (const auto& f : files) {
        const auto d = integrity::hash_file(root / f.path);
        pair.files.push_back({f.path, f.sop_uid, f.accession, d.size, d.digest});
    }
    std::sort(pair.files.begin(), pair.files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    out.batch.manifests_included = requested[fault_kind::omit_manifests] == 0;
    if (out.batch.manifests_included) {
        save_manifests(pair, root);
    } else {
        out.batch.faults_applied.push_back({fault_kind::omit_manifests, "", "", ""});
    }

    // Transfer faults act on the staged tree.
    for (const auto kind : {fault_kind::drop_file, fault_kind::duplicate_file, fault_kind::corrupt_file,
                            fault_kind::truncate_file}) {
        const auto n = requested[kind];
        if (n == 0) continue;
        for (const auto i : pick(every, n, fault_rng, used, kind)) {
            const auto& f = files[i];
            const auto path = root / f.path;
            switch (kind) {
                case fault_kind::drop_file:
                    fs::remove(path);
                    break;
                case fault_kind::duplicate_file: {
                    auto copy = f.path.substr(0, f.path.size() - 4) + "_copy.dcm";
                    fs::copy_file(path, root / copy);
                    out.batch.faults_applied.push_back({kind, copy, f.sop_uid, f.accession});
                    continue;
                }
                case fault_kind::corrupt_file: {
                    auto bytes = read_bytes(path);
                    bytes.back() ^= 0xFF;
                    write_bytes(path, bytes);
                    break;
                }
                case fault_kind::truncate_file: {
                    // Cutting one byte short of the pixel element leaves the preceding value incomplete.
                    const auto offset = f.pixel_offset - (f.stripped ? dicom::prefix_size : 0);
                    fs::resize_file(path, offset - 1);
                    break;
                }
                default:
                    break;
            }
            out.batch.faults_applied.push_back({kind, f.path, f.sop_uid, f.accession});
        }
    }
    if (const auto n = requested[fault_kind::extra_unlisted_file]) {
        std::map<std::size_t, std::uint32_t> extra_per_study;
        for (std::uint32_t k = 0; k < n; ++k) {
            if (out.studies.empty()) {
                throw error(error_code::invalid_argument, "EXTRA_UNLISTED_FILE needs at least one study");
            }
            const auto s = fault_rng() % out.studies.size();
            const auto index = out.studies[s].file_count + extra_per_study[s]++;
            const auto g = generate_instance(out.studies[s], out.study_seeds[s], index, options.profile);
            write_bytes(root / g.path, g.bytes);
            out.batch.faults_applied.push_back(
                {fault_kind::extra_unlisted_file, g.path, g.sop_uid, out.studies[s].accession_number});
        }
    }

    std::set<std::pair<std::string, std::string>> rows_seen;
    for (std::size_t i = 0; i < out.studies.size(); ++i) {
        if (!rows_seen.emplace(out.studies[i].patient_id, canonical[i]).second) continue;
        out.clinical.push_back(clinical_row_for(out.studies[i], canonical[i], out.study_seeds[i]));
    }

    for (const auto& rel : integrity::list_batch_files(root)) {
        out.batch.bytes += fs::file_size(root / rel);
        if (rel.size() > 4 && rel.compare(rel.size() - 4, 4, ".dcm") == 0) ++out.batch.file_count;
    }
    if (out.batch.manifests_included) {
        for (const auto name : {layout::studies_manifest, layout::files_manifest}) {
            out.batch.bytes += fs::file_size(root / std::string(name));
        }
    }
    return out;
}

}  // namespace vision::synth
