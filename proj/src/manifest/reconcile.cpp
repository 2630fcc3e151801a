/**
 * @file reconcile.cpp
 */

#include "vision/manifest/reconcile.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace vision::manifest {

auto reconciliation_report::clean() const -> bool {
    return manifest_present && missing_files.empty() && unexpected_files.empty() && digest_mismatches.empty() &&
           duplicate_sop_uids.empty() && duplicate_accessions.empty() && accession_format_violations.empty() &&
           study_count_deltas.empty();
}

auto reconcile(const std::optional<batch_manifest_pair>& pair, const integrity::hash_snapshot& snapshot,
               std::span<const dicom::header_record> headers, const reconcile_context& context)
    -> reconciliation_report {
    reconciliation_report report;
    report.batch_id = context.batch_id;
    report.manifest_present = pair.has_value();

    const accession_normalizer normalizer(context.rules);
    auto norm = [&](const std::string& raw) { return normalizer.normalize(raw).normalized; };

    // File-level duplicates among the received files.
    std::map<std::string, std::vector<std::string>> paths_by_sop;
    for (const auto& h : headers) {
        if (!h.sop_uid.empty()) paths_by_sop[h.sop_uid].push_back(h.file_path);
    }
    for (const auto& [sop, paths] : paths_by_sop) {
        if (paths.size() > 1) report.duplicate_sop_uids.push_back(sop);
    }

    // Study-level duplicates: one accession, several studies.
    std::set<std::string> dup_accessions;
    std::map<std::string, std::set<std::string>> studies_by_accession;
    for (const auto& h : headers) {
        if (!h.accession_number.empty() && !h.study_uid.empty()) {
            studies_by_accession[norm(h.accession_number)].insert(h.study_uid);
        }
    }
    for (const auto& [acc, studies] : studies_by_accession) {
        if (studies.size() > 1) dup_accessions.insert(acc);
    }
    const std::set<std::string> prior(context.prior_accessions.begin(), context.prior_accessions.end());
    for (const auto& [acc, studies] : studies_by_accession) {
        if (prior.count(acc) != 0) dup_accessions.insert(acc);
    }

    if (pair) {
        std::set<std::string> listed;
        for (const auto& f : pair->files) listed.insert(f.path);

        for (const auto& f : pair->files) {
            const auto* entry = snapshot.find(f.path);
            if (entry == nullptr) {
                report.missing_files.push_back(f.path);
            } else if (entry->digest != f.digest || entry->size != f.size) {
                report.digest_mismatches.push_back(f.path);
            }
        }

        for (const auto& e : snapshot.entries) {
            if (listed.count(e.path) == 0) report.unexpected_files.push_back(e.path);
        }

        std::map<std::string, const dicom::header_record*> header_by_path;
        for (const auto& h : headers) header_by_path[h.file_path] = &h;

        std::map<std::string, std::uint64_t> study_rows;
        std::map<std::string, std::uint64_t> expected;
        for (const auto& s : pair->studies) {
            if (++study_rows[s.accession_number] > 1) dup_accessions.insert(norm(s.accession_number));
            expected[s.accession_number] += s.expected_file_count;
        }
        std::map<std::string, std::uint64_t> listed_per_accession;
        for (const auto& f : pair->files) ++listed_per_accession[f.accession_number];
        for (const auto& [acc, count] : expected) {
            const auto observed = listed_per_accession[acc];
            if (observed != count) report.study_count_deltas[acc] = {count, observed};
        }

        std::set<std::string> violations;
        for (const auto& s : pair->studies) {
            if (!normalizer.normalize(s.accession_number).violations.empty()) {
                violations.insert(s.accession_number);
            }
        }
        for (const auto& f : pair->files) {
            if (!normalizer.normalize(f.accession_number).violations.empty()) {
                violations.insert(f.accession_number);
                continue;
            }
            const auto it = header_by_path.find(f.path);
            if (it != header_by_path.end() && it->second->parse_status != dicom::scan_status::corrupt &&
                norm(it->second->accession_number) != norm(f.accession_number)) {
                violations.insert(f.accession_number);
            }
        }
        report.accession_format_violations.assign(violations.begin(), violations.end());
    }

    report.duplicate_accessions.assign(dup_accessions.begin(), dup_accessions.end());
    std::sort(report.missing_files.begin(), report.missing_files.end());
    std::sort(report.digest_mismatches.begin(), report.digest_mismatches.end());
    std::sort(report.unexpected_files.begin(), report.unexpected_files.end());
    return report;
}

void to_json(nlohmann::json& j, const reconciliation_report& r) {
    nlohmann::json deltas = nlohmann::json::object();
    for (const auto& [acc, d] : r.study_count_deltas) {
        deltas[acc] = nlohmann::json{{"expected", d.first}, {"observed", d.second}};
    }
    j = nlohmann::json{{"batch_id", r.batch_id},
                       {"manifest_present", r.manifest_present},
                       {"missing_files", r.missing_files},
                       {"unexpected_files", r.unexpected_files},
                       {"digest_mismatches", r.digest_mismatches},
                       {"duplicate_sop_uids", r.duplicate_sop_uids},
                       {"duplicate_accessions", r.duplicate_accessions},
                       {"accession_format_violations", r.accession_format_violations},
                       {"study_count_deltas", deltas},
                       {"clean", r.clean()}};
}

void from_json(const nlohmann::json& j, reconciliation_report& r) {
    j.at("batch_id").get_to(r.batch_id);
    j.at("manifest_present").get_to(r.manifest_present);
    j.at("missing_files").get_to(r.missing_files);
    j.at("unexpected_files").get_to(r.unexpected_files);
    j.at("digest_mismatches").get_to(r.digest_mismatches);
    j.at("duplicate_sop_uids").get_to(r.duplicate_sop_uids);
    j.at("duplicate_accessions").get_to(r.duplicate_accessions);
    j.at("accession_format_violations").get_to(r.accession_format_violations);
    r.study_count_deltas.clear();
    for (const auto& [acc, d] : j.at("study_count_deltas").items()) {
        r.study_count_deltas[acc] = {d.at("expected").get<std::uint64_t>(), d.at("observed").get<std::uint64_t>()};
    }
}

}  // namespace vision::manifest
