/**
 * @file profiler.cpp
 */

#include "vision/profiler/profiler.hpp"

#include "vision/common/json.hpp"

#include <algorithm>
#include <set>

namespace vision::profiler {

namespace {

auto label(const std::string& value) -> std::string { return value.empty() ? "(none)" : value; }

}  // namespace

auto profile_batch(const ingest::batch_record& record, std::span<const dicom::file_scan> scans,
                   const batch_reports& reports) -> quality_report {
    quality_report q;
    q.batch_id = record.batch_id;
    q.status_histogram = {{"CORRUPT", 0}, {"LEGACY", 0}, {"MODERN", 0}};

    std::vector<const dicom::file_scan*> ordered;
    for (const auto& s : scans) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->header.file_path < b->header.file_path; });

    std::map<std::string, std::uint64_t> per_study;
    std::map<std::string, std::string> path_by_sop;
    std::set<std::string> corrupt_paths;
    for (const auto* s : ordered) {
        const auto& h = s->header;
        ++q.file_count;
        q.bytes_total += h.file_size;
        ++q.status_histogram[std::string(dicom::to_string(h.parse_status))];
        if (h.parse_status == dicom::scan_status::corrupt) {
            corrupt_paths.insert(h.file_path);
            continue;
        }
        ++per_study[h.study_uid];
        path_by_sop.emplace(h.sop_uid, h.file_path);
    }
    q.study_count = per_study.size();
    if (!per_study.empty()) {
        std::uint64_t total = 0;
        q.files_per_study.min = per_study.begin()->second;
        for (const auto& [uid, n] : per_study) {
            q.files_per_study.min = std::min(q.files_per_study.min, n);
            q.files_per_study.max = std::max(q.files_per_study.max, n);
            total += n;
        }
        q.files_per_study.mean = static_cast<double>(total) / static_cast<double>(per_study.size());
    }

    auto& errors = q.error_list;
    for (const auto* s : ordered) {
        if (s->header.parse_status == dicom::scan_status::corrupt) {
            errors.push_back({s->header.file_path, finding::parse_error, s->error_detail.value_or("unreadable header")});
        }
    }
    for (const auto* s : ordered) {
        if (s->header.parse_status == dicom::scan_status::legacy) {
            errors.push_back({s->header.file_path, finding::legacy_header, "DICM prefix absent; read by force-read"});
        }
    }

    if (const auto& r = reports.reconciliation) {
        if (!r->manifest_present) errors.push_back({"", finding::manifest_absent, "batch arrived without manifests"});
        for (const auto& p : r->missing_files) errors.push_back({p, finding::missing_file, "listed but not received"});
        for (const auto& p : r->unexpected_files) {
            errors.push_back({p, finding::unexpected_file, "received but not listed"});
        }
        for (const auto& p : r->digest_mismatches) {
            errors.push_back({p, finding::digest_mismatch, "size or digest differs from the manifest"});
        }
        for (const auto& sop : r->duplicate_sop_uids) {
            const auto it = path_by_sop.find(sop);
            errors.push_back({it == path_by_sop.end() ? "" : it->second, finding::duplicate_sop_uid,
                              "SOP Instance UID " + sop + " received more than once"});
        }
        for (const auto& acc : r->duplicate_accessions) {
            errors.push_back({"", finding::duplicate_accession, "accession " + acc + " belongs to more than one study"});
        }
        for (const auto& acc : r->accession_format_violations) {
            errors.push_back({"", finding::accession_format, "accession " + acc + " fails the canonical pattern"});
        }
        for (const auto& [acc, d] : r->study_count_deltas) {
            errors.push_back({"", finding::study_count_delta,
                              "accession " + acc + " expects " + std::to_string(d.first) + " files, manifest lists " +
                                  std::to_string(d.second)});
        }
    }
    if (const auto& d = reports.duplicates) {
        for (const auto& [sop, prior] : d->cross_batch) {
            const auto it = path_by_sop.find(sop);
            errors.push_back({it == path_by_sop.end() ? "" : it->second, finding::cross_batch_duplicate,
                              "SOP Instance UID " + sop + " already cataloged by batch " + prior});
        }
    }
    if (const auto& l = reports.link) {
        std::vector<std::string> orphan_paths;
        for (const auto& key : l->orphan_images) {
            const auto it = path_by_sop.find(key);
            if (it != path_by_sop.end()) orphan_paths.push_back(it->second);
        }
        std::sort(orphan_paths.begin(), orphan_paths.end());
        for (const auto& p : orphan_paths) {
            errors.push_back({p, finding::orphan_image, "no clinical snapshot row for this accession"});
        }
        for (const auto& acc : l->orphan_rows) {
            errors.push_back({"", finding::orphan_row, "clinical row " + acc + " has no received image"});
        }
    }
    return q;
}

auto profile_corpus(const catalog::catalog_view& view, std::span<const ingest::batch_record> records)
    -> corpus_stats {
    corpus_stats s;
    for (const auto& dim : corpus_dimensions) s.histograms[dim];
    std::map<std::string, std::uint64_t> per_study;
    for (const auto& [key, e] : view.entries()) {
        ++s.catalog_entries;
        const auto& h = e.header;
        ++s.histograms["modality"][label(h.modality)];
        ++s.histograms["manufacturer"][label(h.manufacturer)];
        ++s.histograms["view_position"][label(h.view_position)];
        ++s.histograms["parse_status"][std::string(dicom::to_string(h.parse_status))];
        ++s.histograms["link_status"][std::string(catalog::to_string(e.link))];
        if (h.parse_status != dicom::scan_status::corrupt) ++per_study[h.study_uid];
    }
    for (const auto& [uid, n] : per_study) ++s.files_per_study[n];
    for (const auto& r : records) {
        ++s.batch_count;
        s.bytes_per_batch[r.batch_id] = r.counts.bytes;
        s.files_per_batch[r.batch_id] = r.counts.files;
        ++s.batch_states[std::string(ingest::to_string(r.state))];
    }
    return s;
}

void to_json(nlohmann::json& j, const quality_finding& f) {
    j = nlohmann::json{{"path", f.path}, {"kind", f.kind}, {"detail", f.detail}};
}

void from_json(const nlohmann::json& j, quality_finding& f) {
    j.at("path").get_to(f.path);
    j.at("kind").get_to(f.kind);
    j.at("detail").get_to(f.detail);
}

void to_json(nlohmann::json& j, const quality_report& r) {
    j = nlohmann::json{{"batch_id", r.batch_id},
                       {"file_count", r.file_count},
                       {"study_count", r.study_count},
                       {"status_histogram", r.status_histogram},
                       {"error_list", r.error_list},
                       {"bytes_total", r.bytes_total},
                       {"files_per_study",
                        {{"min", r.files_per_study.min},
                         {"max", r.files_per_study.max},
                         {"mean", r.files_per_study.mean}}}};
}

void from_json(const nlohmann::json& j, quality_report& r) {
    j.at("batch_id").get_to(r.batch_id);
    j.at("file_count").get_to(r.file_count);
    j.at("study_count").get_to(r.study_count);
    j.at("status_histogram").get_to(r.status_histogram);
    j.at("error_list").get_to(r.error_list);
    j.at("bytes_total").get_to(r.bytes_total);
    const auto& f = j.at("files_per_study");
    r.files_per_study = {f.at("min"), f.at("max"), f.at("mean")};
}

void to_json(nlohmann::json& j, const corpus_stats& s) {
    nlohmann::json fps = nlohmann::json::object();
    for (const auto& [n, studies] : s.files_per_study) fps[std::to_string(n)] = studies;
    j = nlohmann::json{{"histograms", s.histograms},
                       {"files_per_study", fps},
                       {"bytes_per_batch", s.bytes_per_batch},
                       {"files_per_batch", s.files_per_batch},
                       {"batch_states", s.batch_states},
                       {"catalog_entries", s.catalog_entries},
                       {"batch_count", s.batch_count}};
}

auto serialize(const quality_report& r) -> std::string { return canonical_json(r); }
auto serialize(const corpus_stats& s) -> std::string { return canonical_json(s); }

}  // namespace vision::profiler
