/**
 * @file duplicates.cpp
 */

#include "vision/ingest/duplicates.hpp"

#include <map>
#include <set>

namespace vision::ingest {

auto detect_duplicates(std::span<const dicom::header_record> headers, const catalog::catalog_view& view,
                       const std::string& batch_id, const manifest::accession_normalizer& normalizer)
    -> duplicate_report {
    // Accession -> study UIDs cataloged by other batches.
    std::map<std::string, std::set<std::string>> cataloged_studies;
    for (const auto& [key, e] : view.entries()) {
        if (e.batch_id == batch_id || e.header.accession_number.empty()) continue;
        cataloged_studies[normalizer.normalize(e.header.accession_number).normalized].insert(e.header.study_uid);
    }

    std::set<std::string> files;
    std::set<std::pair<std::string, std::string>> cross;
    std::set<std::string> studies;
    for (const auto& h : headers) {
        if (h.parse_status == dicom::scan_status::corrupt) continue;
        if (!h.sop_uid.empty()) {
            if (const auto* prior = view.find(h.sop_uid); prior != nullptr && prior->batch_id != batch_id) {
                files.insert(h.sop_uid);
                cross.emplace(h.sop_uid, prior->batch_id);
            }
        }
        if (h.accession_number.empty()) continue;
        const auto acc = normalizer.normalize(h.accession_number).normalized;
        const auto it = cataloged_studies.find(acc);
        if (it == cataloged_studies.end()) continue;
        for (const auto& uid : it->second) {
            if (uid != h.study_uid) studies.insert(acc);
        }
    }
    return {{files.begin(), files.end()}, {studies.begin(), studies.end()}, {cross.begin(), cross.end()}};
}

void to_json(nlohmann::json& j, const duplicate_report& r) {
    auto cross = nlohmann::json::array();
    for (const auto& [sop, batch] : r.cross_batch) cross.push_back({{"sop_uid", sop}, {"prior_batch_id", batch}});
    j = nlohmann::json{{"dup_files", r.dup_files}, {"dup_studies", r.dup_studies}, {"cross_batch", cross}};
}

void from_json(const nlohmann::json& j, duplicate_report& r) {
    j.at("dup_files").get_to(r.dup_files);
    j.at("dup_studies").get_to(r.dup_studies);
    r.cross_batch.clear();
    for (const auto& c : j.at("cross_batch")) r.cross_batch.emplace_back(c.at("sop_uid"), c.at("prior_batch_id"));
}

}  // namespace vision::ingest
