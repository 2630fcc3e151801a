/**
 * @file snapshot.cpp
 */

#include "vision/integrity/snapshot.hpp"

#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"
#include "vision/common/layout.hpp"
#include "vision/common/parallel.hpp"
#include "vision/integrity/sha256.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace vision::integrity {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view header_magic = "#vision-snapshot v1";

auto split_tabs(std::string_view line) -> std::vector<std::string_view> {
    std::vector<std::string_view> out;
    while (true) {
        const auto tab = line.find('\t');
        out.push_back(line.substr(0, tab));
        if (tab == std::string_view::npos) break;
        line = line.substr(tab + 1);
    }
    return out;
}

auto workers_or_default(std::size_t workers) -> std::size_t {
    return workers == 0 ? default_worker_count() : workers;
}

}  // namespace

auto hash_snapshot::find(std::string_view path) const -> const snapshot_entry* {
    const auto it = std::lower_bound(entries.begin(), entries.end(), path,
                                     [](const snapshot_entry& e, std::string_view p) { return e.path < p; });
    return it != entries.end() && it->path == path ? &*it : nullptr;
}

auto list_batch_files(const fs::path& root) -> std::vector<std::string> {
    std::vector<std::string> out;
    if (!fs::exists(root)) return out;
    for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        auto rel = fs::relative(it->path(), root).generic_string();
        if (layout::is_batch_metadata(rel)) continue;
        if (rel.size() > 4 && rel.substr(rel.size() - 4) == ".tmp" && layout::is_batch_metadata(rel.substr(0, rel.size() - 4))) {
            continue;
        }
        out.push_back(std::move(rel));
    }
    std::sort(out.begin(), out.end());
    return out;
}

auto snapshot_batch(const fs::path& root, std::string batch_id, std::string created_at, std::size_t workers)
    -> hash_snapshot {
    if (!fs::is_directory(root)) throw error(error_code::io_error, "batch root not readable: " + root.string());
    hash_snapshot snap{std::move(batch_id), std::move(created_at), {}};
    const auto paths = list_batch_files(root);
    snap.entries.resize(paths.size());
    parallel_for(paths.size(), workers_or_default(workers), [&](std::size_t i) {
        const auto d = hash_file(root / paths[i]);
        snap.entries[i] = snapshot_entry{paths[i], d.size, d.digest};
    });
    return snap;
}

auto verify_snapshot(const hash_snapshot& snapshot, const fs::path& root, std::size_t workers)
    -> verification_report {
    verification_report report;
    const auto present = list_batch_files(root);
    const std::set<std::string> present_set(present.begin(), present.end());

    std::vector<const snapshot_entry*> to_check;
    for (const auto& e : snapshot.entries) {
        if (present_set.count(e.path) == 0) {
            report.missing.push_back(e.path);
        } else {
            to_check.push_back(&e);
        }
    }
    for (const auto& p : present) {
        if (snapshot.find(p) == nullptr) report.added.push_back(p);
    }

    std::vector<char> bad(to_check.size(), 0);
    parallel_for(to_check.size(), workers_or_default(workers), [&](std::size_t i) {
        try {
            const auto d = hash_file(root / to_check[i]->path);
            bad[i] = d.size != to_check[i]->size || d.digest != to_check[i]->digest;
        } catch (const error&) {
            bad[i] = 1;
        }
    });
    for (std::size_t i = 0; i < to_check.size(); ++i) {
        if (bad[i]) report.mismatched.push_back(to_check[i]->path);
    }
    report.ok = report.missing.empty() && report.added.empty() && report.mismatched.empty();
    return report;
}

auto serialize_snapshot(const hash_snapshot& snapshot) -> std::string {
    auto entries = snapshot.entries;
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    std::string out;
    out.append(header_magic).append("\t").append(snapshot.batch_id).append("\t").append(snapshot.created_at).append("\n");
    for (const auto& e : entries) {
        out.append(e.path).append("\t").append(std::to_string(e.size)).append("\t").append(e.digest).append("\n");
    }
    return out;
}

auto parse_snapshot(std::string_view text) -> hash_snapshot {
    hash_snapshot snap;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const auto where = "snapshot line " + std::to_string(line_no) + ": ";
        const auto cols = split_tabs(line);
        if (!header_seen) {
            if (cols.size() != 3 || cols[0] != header_magic) {
                throw error(error_code::invalid_argument, where + "missing #vision-snapshot v1 header");
            }
            snap.batch_id = std::string(cols[1]);
            snap.created_at = std::string(cols[2]);
            header_seen = true;
            continue;
        }
        if (cols.size() != 3) throw error(error_code::invalid_argument, where + "expected 3 columns");
        snapshot_entry e{std::string(cols[0]), 0, std::string(cols[2])};
        const auto [ptr, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), e.size);
        if (ec != std::errc{} || ptr != cols[1].data() + cols[1].size() || cols[1].empty()) {
            throw error(error_code::invalid_argument, where + "size is not an unsigned integer");
        }
        if (!is_hex_digest(e.digest)) throw error(error_code::invalid_argument, where + "bad digest");
        if (!snap.entries.empty() && !(snap.entries.back().path < e.path)) {
            throw error(error_code::invalid_argument, where + "paths not strictly sorted");
        }
        snap.entries.push_back(std::move(e));
    }
    if (!header_seen) throw error(error_code::invalid_argument, "snapshot is empty");
    return snap;
}

void save_snapshot(const hash_snapshot& snapshot, const fs::path& root) {
    write_text_atomic(root / layout::snapshot_file, serialize_snapshot(snapshot));
}

auto load_snapshot(const fs::path& root) -> hash_snapshot {
    return parse_snapshot(read_text(root / layout::snapshot_file));
}

void to_json(nlohmann::json& j, const verification_report& r) {
    j = nlohmann::json{{"ok", r.ok}, {"missing", r.missing}, {"added", r.added}, {"mismatched", r.mismatched}};
}

}  // namespace vision::integrity
