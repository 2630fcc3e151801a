/**
 * @file clinical.cpp
 */

#include "vision/catalog/clinical.hpp"

#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"

#include <charconv>
#include <set>
#include <utility>

namespace vision::catalog {

auto parse_clinical_snapshot(std::string_view text) -> std::vector<clinical_snapshot_row> {
    std::vector<clinical_snapshot_row> rows;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line_no == 1 && line == clinical_columns) continue;
        if (line.empty()) continue;
        const auto where = "clinical snapshot line " + std::to_string(line_no) + ": ";

        std::vector<std::string> cols;
        std::string_view rest = line;
        while (true) {
            const auto tab = rest.find('\t');
            cols.emplace_back(rest.substr(0, tab));
            if (tab == std::string_view::npos) break;
            rest = rest.substr(tab + 1);
        }
        if (cols.size() != 7) throw error(error_code::invalid_argument, where + "expected 7 columns");

        clinical_snapshot_row row;
        row.patient_id = cols[0];
        row.accession_number = cols[1];
        const auto [ptr, ec] = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(),
                                               row.demographics.birth_year);
        if (ec != std::errc{} || ptr != cols[2].data() + cols[2].size()) {
            throw error(error_code::invalid_argument, where + "birth_year is not a number");
        }
        row.demographics.sex = cols[3];
        row.demographics.site_code = cols[4];
        row.study_date = cols[5];
        row.report_text = cols[6];
        if (!seen.emplace(row.patient_id, row.accession_number).second) {
            throw error(error_code::invalid_argument,
                        where + "duplicate (patient_id, accession_number) " + row.patient_id + "/" + row.accession_number);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

auto serialize_clinical_snapshot(const std::vector<clinical_snapshot_row>& rows) -> std::string {
    std::string out(clinical_columns);
    out += '\n';
    for (const auto& r : rows) {
        out.append(r.patient_id).append("\t").append(r.accession_number).append("\t");
        out.append(std::to_string(r.demographics.birth_year)).append("\t").append(r.demographics.sex).append("\t");
        out.append(r.demographics.site_code).append("\t").append(r.study_date).append("\t").append(r.report_text);
        out += '\n';
    }
    return out;
}

auto load_clinical_snapshot(const std::filesystem::path& path) -> std::vector<clinical_snapshot_row> {
    if (!std::filesystem::exists(path)) return {};
    return parse_clinical_snapshot(read_text(path));
}

void save_clinical_snapshot(const std::vector<clinical_snapshot_row>& rows, const std::filesystem::path& path) {
    write_text_atomic(path, serialize_clinical_snapshot(rows));
}

}  // namespace vision::catalog
