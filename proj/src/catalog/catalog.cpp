/**
 * @file catalog.cpp
 */

#include "vision/catalog/catalog.hpp"

#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"
#include "vision/common/layout.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace vision::catalog {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view index_magic = "#vision-catalog-idx v1";

struct replay_result {
    entry_map entries;
    std::map<std::string, std::uint64_t> offsets;
    std::uint64_t committed_size{};
};

auto replay(std::string_view text) -> replay_result {
    replay_result out;
    std::vector<std::pair<catalog_entry, std::uint64_t>> pending;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) break;
        const auto line = text.substr(pos, nl - pos);
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) break;
        if (j.contains("commit")) {
            for (auto& [entry, offset] : pending) {
                auto key = entry.key();
                out.offsets[key] = offset;
                out.entries.insert_or_assign(std::move(key), std::move(entry));
            }
            pending.clear();
            out.committed_size = nl + 1;
        } else {
            try {
                pending.emplace_back(j.get<catalog_entry>(), pos);
            } catch (const std::exception&) {
                break;
            }
        }
        pos = nl + 1;
    }
    return out;
}

auto index_text(const std::map<std::string, std::uint64_t>& offsets, std::uint64_t log_size) -> std::string {
    std::string out(index_magic);
    out += '\t' + std::to_string(log_size) + '\n';
    for (const auto& [key, offset] : offsets) out += key + '\t' + std::to_string(offset) + '\n';
    return out;
}

auto index_is_current(const fs::path& path, std::uint64_t log_size) -> bool {
    std::ifstream in(path);
    std::string first;
    if (!in || !std::getline(in, first)) return false;
    return first == std::string(index_magic) + '\t' + std::to_string(log_size);
}

auto entry_order(const catalog_entry& a, const catalog_entry& b) -> bool {
    if (a.header.study_uid != b.header.study_uid) return a.header.study_uid < b.header.study_uid;
    if (a.header.sop_uid != b.header.sop_uid) return a.header.sop_uid < b.header.sop_uid;
    return a.key() < b.key();
}

}  // namespace

// ---- link ------------------------------------------------------------------

void to_json(nlohmann::json& j, const link_report& r) {
    j = nlohmann::json{{"linked", r.linked}, {"orphan_images", r.orphan_images}, {"orphan_rows", r.orphan_rows}};
}

void from_json(const nlohmann::json& j, link_report& r) {
    j.at("linked").get_to(r.linked);
    j.at("orphan_images").get_to(r.orphan_images);
    j.at("orphan_rows").get_to(r.orphan_rows);
}

auto link_clinical(std::span<catalog_entry> entries, std::span<const clinical_snapshot_row> snapshot,
                   const manifest::accession_normalizer& normalizer) -> link_report {
    std::map<std::string, std::set<std::string>> patients_by_accession;
    for (const auto& row : snapshot) {
        patients_by_accession[normalizer.normalize(row.accession_number).normalized].insert(row.patient_id);
    }

    link_report report;
    std::set<std::string> matched;
    for (auto& e : entries) {
        if (e.header.parse_status == dicom::scan_status::corrupt || e.header.accession_number.empty()) {
            e.link = link_status::orphan_image;
            report.orphan_images.push_back(e.key());
            continue;
        }
        const auto acc = normalizer.normalize(e.header.accession_number).normalized;
        const auto it = patients_by_accession.find(acc);
        if (it == patients_by_accession.end()) {
            e.link = link_status::orphan_image;
            report.orphan_images.push_back(e.key());
            continue;
        }
        matched.insert(acc);
        if (it->second.size() > 1) {
            e.link = link_status::ambiguous;
        } else {
            e.link = link_status::linked;
            ++report.linked;
        }
    }
    for (const auto& row : snapshot) {
        if (!matched.contains(normalizer.normalize(row.accession_number).normalized)) {
            report.orphan_rows.push_back(row.accession_number);
        }
    }
    std::sort(report.orphan_images.begin(), report.orphan_images.end());
    std::sort(report.orphan_rows.begin(), report.orphan_rows.end());
    report.orphan_rows.erase(std::unique(report.orphan_rows.begin(), report.orphan_rows.end()),
                             report.orphan_rows.end());
    return report;
}

// ---- filter ----------------------------------------------------------------

auto catalog_filter::field_names() -> const std::vector<std::string>& {
    static const std::vector<std::string> names{"batch_id",     "link_status",     "manufacturer", "modality",
                                                "parse_status", "study_date_from", "study_date_to"};
    return names;
}

auto catalog_filter::from_pairs(const std::map<std::string, std::string>& pairs) -> catalog_filter {
    catalog_filter f;
    for (const auto& [field, value] : pairs) {
        if (field == "modality") {
            f.modality = value;
        } else if (field == "manufacturer") {
            f.manufacturer = value;
        } else if (field == "study_date_from") {
            f.study_date_from = value;
        } else if (field == "study_date_to") {
            f.study_date_to = value;
        } else if (field == "batch_id") {
            f.batch_id = value;
        } else if (field == "parse_status") {
            f.parse_status = dicom::parse_scan_status(value);
            if (!f.parse_status) {
                throw error(error_code::invalid_argument, "parse_status must be one of MODERN, LEGACY, CORRUPT");
            }
        } else if (field == "link_status") {
            f.link = parse_link_status(value);
            if (!f.link) {
                throw error(error_code::invalid_argument, "link_status must be one of LINKED, ORPHAN_IMAGE, AMBIGUOUS");
            }
        } else {
            std::string valid;
            for (const auto& n : field_names()) valid += (valid.empty() ? "" : ", ") + n;
            throw error(error_code::unknown_filter_field, "unknown filter field '" + field + "'; valid fields: " + valid);
        }
    }
    return f;
}

auto catalog_filter::matches(const catalog_entry& e) const -> bool {
    if (modality && e.header.modality != *modality) return false;
    if (manufacturer && e.header.manufacturer != *manufacturer) return false;
    if (study_date_from && e.header.study_date < *study_date_from) return false;
    if (study_date_to && e.header.study_date > *study_date_to) return false;
    if (parse_status && e.header.parse_status != *parse_status) return false;
    if (link && e.link != *link) return false;
    if (batch_id && e.batch_id != *batch_id) return false;
    return true;
}

// ---- view ------------------------------------------------------------------

auto catalog_view::query(const catalog_filter& filter) const -> std::vector<catalog_entry> {
    std::vector<catalog_entry> out;
    for (const auto& [key, e] : *entries_) {
        if (filter.matches(e)) out.push_back(e);
    }
    std::sort(out.begin(), out.end(), entry_order);
    return out;
}

auto catalog_view::find(const std::string& key) const -> const catalog_entry* {
    const auto it = entries_->find(key);
    return it == entries_->end() ? nullptr : &it->second;
}

// ---- store -----------------------------------------------------------------

struct catalog::state {
    fs::path dir;
    std::mutex write_mutex;
    mutable std::mutex view_mutex;
    std::shared_ptr<const entry_map> current;
    std::map<std::string, std::uint64_t> offsets;
    std::uint64_t log_size{};
};

catalog::catalog(std::unique_ptr<state> s) : state_(std::move(s)) {}
catalog::catalog(catalog&&) noexcept = default;
catalog& catalog::operator=(catalog&&) noexcept = default;
catalog::~catalog() = default;

auto catalog::dir() const -> const fs::path& { return state_->dir; }
auto catalog::log_path() const -> fs::path { return state_->dir / std::string(layout::catalog_log); }
auto catalog::index_path() const -> fs::path { return state_->dir / std::string(layout::catalog_index); }

auto catalog::open(const fs::path& dir) -> catalog {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw error(error_code::io_error, "cannot create catalog dir " + dir.string() + ": " + ec.message());

    auto s = std::make_unique<state>();
    s->dir = dir;
    const auto log = dir / std::string(layout::catalog_log);
    const auto idx = dir / std::string(layout::catalog_index);

    std::string text = fs::exists(log) ? read_text(log) : std::string{};
    auto replayed = replay(text);
    if (replayed.committed_size != text.size()) {
        fs::resize_file(log, replayed.committed_size, ec);
        if (ec) throw error(error_code::io_error, "cannot truncate " + log.string() + ": " + ec.message());
    }
    if (!index_is_current(idx, replayed.committed_size)) {
        write_text_atomic(idx, index_text(replayed.offsets, replayed.committed_size));
    }
    s->current = std::make_shared<const entry_map>(std::move(replayed.entries));
    s->offsets = std::move(replayed.offsets);
    s->log_size = replayed.committed_size;
    return catalog(std::move(s));
}

auto catalog::load_view(const fs::path& dir) -> catalog_view {
    const auto log = dir / std::string(layout::catalog_log);
    if (!fs::exists(log)) return {};
    auto replayed = replay(read_text(log));
    return catalog_view(std::make_shared<const entry_map>(std::move(replayed.entries)));
}

auto catalog::view() const -> catalog_view {
    std::lock_guard lock(state_->view_mutex);
    return catalog_view(state_->current);
}

auto catalog::upsert_entries(std::span<const catalog_entry> entries, const std::string& batch_id) -> upsert_counts {
    std::lock_guard writer(state_->write_mutex);
    auto next = std::make_shared<entry_map>(view().entries());
    upsert_counts counts;
    std::vector<std::string> changed;
    for (const auto& incoming : entries) {
        auto key = incoming.key();
        const auto it = next->find(key);
        if (it == next->end()) {
            next->emplace(key, incoming);
            ++counts.inserted;
            changed.push_back(std::move(key));
            continue;
        }
        auto& stored = it->second;
        const bool known = stored.digest == incoming.digest ||
                           std::find(stored.audit_digests.begin(), stored.audit_digests.end(), incoming.digest) !=
                               stored.audit_digests.end();
        if (known) {
            ++counts.unchanged;
            continue;
        }
        if (stored.audit_digests.empty()) stored.audit_digests.push_back(stored.digest);
        stored.audit_digests.push_back(incoming.digest);
        stored.link = link_status::ambiguous;
        ++counts.conflicted;
        changed.push_back(std::move(key));
    }

    std::sort(changed.begin(), changed.end());
    changed.erase(std::unique(changed.begin(), changed.end()), changed.end());

    std::string block;
    auto offsets = state_->offsets;
    for (const auto& key : changed) {
        offsets[key] = state_->log_size + block.size();
        block += nlohmann::json(next->at(key)).dump();
        block += '\n';
    }
    block += nlohmann::json{{"commit", true}, {"batch_id", batch_id}, {"count", changed.size()}}.dump();
    block += '\n';

    const auto log = log_path();
    try {
        append_durable(log, block);
    } catch (...) {
        std::error_code ec;
        fs::resize_file(log, state_->log_size, ec);
        throw;
    }
    state_->log_size += block.size();
    state_->offsets = std::move(offsets);
    {
        std::lock_guard lock(state_->view_mutex);
        state_->current = std::move(next);
    }
    write_text_atomic(index_path(), index_text(state_->offsets, state_->log_size));
    return counts;
}

auto build_index_text(const fs::path& log_path) -> std::string {
    const std::string text = fs::exists(log_path) ? read_text(log_path) : std::string{};
    const auto replayed = replay(text);
    return index_text(replayed.offsets, replayed.committed_size);
}

}  // namespace vision::catalog
