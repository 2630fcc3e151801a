/**
 * @file manifest.cpp
 */

#include "vision/manifest/manifest.hpp"

#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"
#include "vision/common/layout.hpp"
#include "vision/integrity/sha256.hpp"

#include <charconv>
#include <map>
#include <set>

namespace vision::manifest {

namespace {

constexpr std::string_view header_line = "#vision-manifest v1";

auto fail(std::string message) -> error { return error(error_code::manifest_invalid, std::move(message)); }

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

auto parse_u64(std::string_view text, const std::string& where, const char* what) -> std::uint64_t {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw fail(where + ": " + what + " is not an unsigned integer: '" + std::string(text) + "'");
    }
    return v;
}

/// Calls row(columns, where) for every data line; validates the header and column count.
template <typename RowFn>
void for_each_row(std::string_view text, std::string_view file_name, std::size_t columns, RowFn row) {
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const auto where = std::string(file_name) + ":" + std::to_string(line_no);
        if (!header_seen) {
            if (line != header_line) throw fail(where + ": expected header '#vision-manifest v1'");
            header_seen = true;
            continue;
        }
        const auto cols = split_tabs(line);
        if (cols.size() != columns) {
            throw fail(where + ": expected " + std::to_string(columns) + " columns, got " +
                       std::to_string(cols.size()));
        }
        row(cols, where);
    }
    if (!header_seen) throw fail(std::string(file_name) + ":1: expected header '#vision-manifest v1'");
}

}  // namespace

auto batch_manifest_pair::expected_file_total() const -> std::uint64_t {
    std::uint64_t total = 0;
    for (const auto& s : studies) total += s.expected_file_count;
    return total;
}

auto parse_manifests(std::string_view study_text, std::string_view file_text) -> batch_manifest_pair {
    batch_manifest_pair pair;
    for_each_row(study_text, layout::studies_manifest, 4, [&](const auto& cols, const std::string& where) {
        if (cols[0].empty()) throw fail(where + ": empty accession_number");
        pair.studies.push_back(study_row{std::string(cols[0]), std::string(cols[1]), std::string(cols[2]),
                                         parse_u64(cols[3], where, "expected_file_count")});
    });
    for_each_row(file_text, layout::files_manifest, 5, [&](const auto& cols, const std::string& where) {
        if (cols[0].empty()) throw fail(where + ": empty path");
        if (!integrity::is_hex_digest(cols[4])) {
            throw fail(where + ": digest is not 64 lowercase hex characters");
        }
        pair.files.push_back(file_row{std::string(cols[0]), std::string(cols[1]), std::string(cols[2]),
                                      parse_u64(cols[3], where, "size"), std::string(cols[4])});
    });

    std::set<std::string> accessions;
    for (const auto& s : pair.studies) accessions.insert(s.accession_number);
    std::set<std::string> sops;
    std::set<std::string> paths;
    for (const auto& f : pair.files) {
        if (accessions.count(f.accession_number) == 0) {
            throw fail("file " + f.path + " references accession " + f.accession_number +
                       " absent from the study manifest");
        }
        if (!sops.insert(f.sop_uid).second) throw fail("duplicate sop_uid " + f.sop_uid + " in file manifest");
        if (!paths.insert(f.path).second) throw fail("duplicate path " + f.path + " in file manifest");
    }
    if (pair.expected_file_total() != pair.files.size()) {
        throw fail("study manifest expects " + std::to_string(pair.expected_file_total()) + " files but file manifest lists " +
                   std::to_string(pair.files.size()));
    }
    return pair;
}

auto serialize_studies(const batch_manifest_pair& pair) -> std::string {
    std::string out(header_line);
    out += '\n';
    for (const auto& s : pair.studies) {
        out.append(s.accession_number).append("\t").append(s.study_uid).append("\t").append(s.modality);
        out.append("\t").append(std::to_string(s.expected_file_count)).append("\n");
    }
    return out;
}

auto serialize_files(const batch_manifest_pair& pair) -> std::string {
    std::string out(header_line);
    out += '\n';
    for (const auto& f : pair.files) {
        out.append(f.path).append("\t").append(f.sop_uid).append("\t").append(f.accession_number);
        out.append("\t").append(std::to_string(f.size)).append("\t").append(f.digest).append("\n");
    }
    return out;
}

void save_manifests(const batch_manifest_pair& pair, const std::filesystem::path& root) {
    write_text_atomic(root / layout::studies_manifest, serialize_studies(pair));
    write_text_atomic(root / layout::files_manifest, serialize_files(pair));
}

auto load_manifests(const std::filesystem::path& root) -> std::optional<batch_manifest_pair> {
    const auto studies = root / layout::studies_manifest;
    const auto files = root / layout::files_manifest;
    const bool has_studies = std::filesystem::exists(studies);
    const bool has_files = std::filesystem::exists(files);
    if (!has_studies && !has_files) return std::nullopt;
    if (has_studies != has_files) {
        throw fail(std::string("incomplete manifest pair: missing ") +
                   std::string(has_studies ? layout::files_manifest : layout::studies_manifest));
    }
    return parse_manifests(read_text(studies), read_text(files));
}

}  // namespace vision::manifest
