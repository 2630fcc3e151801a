/**
 * @file study.cpp
 */

#include "vision/synth/study.hpp"

#include "vision/common/config.hpp"
#include "vision/common/error.hpp"
#include "vision/dicom/writer.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

namespace vision::synth {

namespace {

constexpr std::string_view cr_sop_class = "1.2.840.10008.5.1.4.1.1.1";
constexpr std::string_view mr_sop_class = "1.2.840.10008.5.1.4.1.1.4";
constexpr std::uint32_t mr_series_size = 200;

auto pad5(std::uint32_t n) -> std::string {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05u", n);
    return buf;
}

auto uniform(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) -> std::uint64_t {
    return lo + rng() % (hi - lo + 1);
}

auto random_date(std::mt19937_64& rng) -> std::string {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04u%02u%02u", static_cast<unsigned>(uniform(rng, 2000, 2020)),
                  static_cast<unsigned>(uniform(rng, 1, 12)), static_cast<unsigned>(uniform(rng, 1, 28)));
    return buf;
}

auto pick_manufacturer(std::mt19937_64& rng, const generation_profile& profile) -> std::string {
    if (profile.manufacturers.empty()) return "ACME";
    if (profile.manufacturer_weights.size() != profile.manufacturers.size()) {
        return profile.manufacturers[rng() % profile.manufacturers.size()];
    }
    const double total = std::accumulate(profile.manufacturer_weights.begin(), profile.manufacturer_weights.end(), 0.0);
    double u = std::generate_canonical<double, 53>(rng) * total;
    for (std::size_t i = 0; i < profile.manufacturers.size(); ++i) {
        if (u < profile.manufacturer_weights[i]) return profile.manufacturers[i];
        u -= profile.manufacturer_weights[i];
    }
    return profile.manufacturers.back();
}

auto group_length(const std::vector<dicom::data_element>& meta) -> std::uint32_t {
    std::uint32_t total = 0;
    for (const auto& e : meta) total += 8 + e.length;
    return total;
}

}  // namespace

auto to_string(modality m) -> std::string { return m == modality::cr ? "CR" : "MR"; }

auto mix_seed(std::uint64_t seed, std::uint64_t salt) -> std::uint64_t {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void validate(const study_spec& spec) {
    const auto [lo, hi] = spec.modality == modality::cr ? std::pair{cr_min_files, cr_max_files}
                                                        : std::pair{mr_min_files, mr_max_files};
    if (spec.file_count < lo || spec.file_count > hi) {
        throw error(error_code::invalid_argument, to_string(spec.modality) + " study needs " + std::to_string(lo) +
                                                      " to " + std::to_string(hi) + " files, got " +
                                                      std::to_string(spec.file_count));
    }
    if (spec.accession_number.empty() || spec.patient_id.empty() || spec.study_date.size() != 8) {
        throw error(error_code::invalid_argument, "study spec needs accession, patient and an 8-digit study date");
    }
}

auto generation_profile::from_config(const config& cfg) -> generation_profile {
    generation_profile p;
    if (auto list = cfg.get_list("generation.manufacturers"); !list.empty()) p.manufacturers = std::move(list);
    for (const auto& w : cfg.get_list("generation.manufacturer_weights")) {
        try {
            p.manufacturer_weights.push_back(std::stod(w));
        } catch (const std::exception&) {
            throw error(error_code::invalid_argument, "generation.manufacturer_weights: '" + w + "' is not a number");
        }
    }
    if (!p.manufacturer_weights.empty() && p.manufacturer_weights.size() != p.manufacturers.size()) {
        throw error(error_code::invalid_argument, "generation.manufacturer_weights must match generation.manufacturers");
    }
    p.cr_payload_bytes = static_cast<std::uint32_t>(cfg.get_u64("generation.cr_payload_bytes", p.cr_payload_bytes));
    p.mr_payload_bytes = static_cast<std::uint32_t>(cfg.get_u64("generation.mr_payload_bytes", p.mr_payload_bytes));
    return p;
}

auto study_uid_for(std::uint64_t seed) -> std::string {
    // Top bit set keeps the component non-zero without a leading zero.
    return "2.25." + std::to_string(mix_seed(seed, 0x57D1) | (1ull << 63));
}

auto instance_elements(const study_spec& spec, std::uint64_t seed, std::uint32_t index,
                       const generation_profile& profile) -> std::vector<dicom::data_element> {
    using namespace dicom;
    namespace t = dicom::tags;

    const bool cr = spec.modality == modality::cr;
    const auto study_uid = study_uid_for(seed);
    std::mt19937_64 study_rng(mix_seed(seed, 0x5EED));
    const auto kvp_base = uniform(study_rng, 80, 125);
    const auto exposure_base = uniform(study_rng, 5, 40);
    const auto software = "V" + std::to_string(uniform(study_rng, 1, 9)) + "." + std::to_string(uniform(study_rng, 0, 9));
    static const std::vector<std::string> cr_descriptions{"CHEST 2 VIEWS", "CHEST PA AND LATERAL", "CHEST 1 VIEW"};
    static const std::vector<std::string> mr_descriptions{"MRI BRAIN W/O CONTRAST", "MRI BRAIN W/WO CONTRAST",
                                                          "MRI HEAD"};
    const auto& descriptions = cr ? cr_descriptions : mr_descriptions;
    const auto description = descriptions[study_rng() % descriptions.size()];

    std::mt19937_64 rng(mix_seed(seed, 0x1000 + index));
    const std::uint32_t series = cr ? (index < 2 ? 1 : 2) : 1 + index / mr_series_size;
    const auto series_uid = study_uid + "." + std::to_string(series);
    const auto sop_uid = series_uid + "." + std::to_string(index + 1);
    const auto sop_class = cr ? cr_sop_class : mr_sop_class;

    std::vector<data_element> meta{
        make_text(t::media_storage_sop_class_uid, "UI", sop_class),
        make_text(t::media_storage_sop_instance_uid, "UI", sop_uid),
        make_text(t::transfer_syntax_uid, "UI", explicit_vr_little_endian),
    };
    std::vector<data_element> out;
    out.push_back(make_ul(t::file_meta_group_length, group_length(meta)));
    out.insert(out.end(), meta.begin(), meta.end());

    out.push_back(make_text(t::image_type, "CS", cr && index >= 2 ? "DERIVED\\SECONDARY" : "ORIGINAL\\PRIMARY"));
    out.push_back(make_text(t::sop_class_uid, "UI", sop_class));
    out.push_back(make_text(t::sop_instance_uid, "UI", sop_uid));
    out.push_back(make_text(t::study_date, "DA", spec.study_date));
    out.push_back(make_text(t::accession_number, "SH", spec.accession_number));
    out.push_back(make_text(t::modality, "CS", to_string(spec.modality)));
    out.push_back(make_text(t::manufacturer, "LO", spec.manufacturer));
    out.push_back(make_text(t::study_description, "LO", description));
    out.push_back(make_text(t::patient_id, "LO", spec.patient_id));
    if (cr) out.push_back(make_text(t::kvp, "DS", std::to_string(kvp_base + rng() % 5)));
    out.push_back(make_text(t::software_versions, "LO", spec.manufacturer + " " + software));
    if (cr) out.push_back(make_text(t::exposure_time, "IS", std::to_string(exposure_base + rng() % 3)));
    if (cr) out.push_back(make_text(t::view_position, "CS", index % 2 == 0 ? "FRONT" : "SIDE"));
    out.push_back(make_text(t::study_instance_uid, "UI", study_uid));
    out.push_back(make_text(t::series_instance_uid, "UI", series_uid));
    out.push_back(make_us(t::rows, cr ? 2048 : 256));
    out.push_back(make_us(t::columns, cr ? 2500 : 256));

    std::vector<std::uint8_t> payload(cr ? profile.cr_payload_bytes : profile.mr_payload_bytes);
    if (payload.size() % 2) payload.push_back(0);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    out.push_back(make_ob(t::pixel_data, std::move(payload)));
    return out;
}

auto generate_instance(const study_spec& spec, std::uint64_t seed, std::uint32_t index,
                       const generation_profile& profile) -> generated_file {
    const auto elements = instance_elements(spec, seed, index, profile);
    generated_file f;
    const auto study_uid = study_uid_for(seed);
    const auto& sop = elements[2];
    f.sop_uid = sop.as_string();
    const auto series = f.sop_uid.substr(study_uid.size() + 1, f.sop_uid.find('.', study_uid.size() + 1) -
                                                                   study_uid.size() - 1);
    f.path = study_uid + "/" + series + "/" + pad5(index + 1) + ".dcm";
    f.bytes = dicom::write_file(elements);
    f.pixel_offset = dicom::element_offsets(elements).back();
    return f;
}

auto generate_study(const study_spec& spec, std::uint64_t seed, const generation_profile& profile)
    -> std::vector<generated_file> {
    validate(spec);
    std::vector<generated_file> files;
    files.reserve(spec.file_count);
    for (std::uint32_t i = 0; i < spec.file_count; ++i) files.push_back(generate_instance(spec, seed, i, profile));
    return files;
}

namespace {

auto random_spec(modality m, std::uint32_t file_count, std::mt19937_64& rng, const generation_profile& profile)
    -> study_spec {
    study_spec s;
    s.modality = m;
    char acc[32];
    std::snprintf(acc, sizeof acc, "ACC%010llX", static_cast<unsigned long long>(rng() & 0xFFFFFFFFFFull));
    s.accession_number = acc;
    char pid[16];
    std::snprintf(pid, sizeof pid, "P%07u", static_cast<unsigned>(rng() % 10000000));
    s.patient_id = pid;
    s.study_date = random_date(rng);
    s.file_count = file_count;
    s.manufacturer = pick_manufacturer(rng, profile);
    return s;
}

auto range_for(modality m) -> std::pair<std::uint32_t, std::uint32_t> {
    return m == modality::cr ? std::pair{cr_min_files, cr_max_files} : std::pair{mr_min_files, mr_max_files};
}

}  // namespace

auto plan_studies(modality m, std::size_t count, std::uint64_t seed, const generation_profile& profile)
    -> std::vector<study_spec> {
    std::mt19937_64 rng(mix_seed(seed, 0x9147 + static_cast<std::uint64_t>(m)));
    const auto [lo, hi] = range_for(m);
    std::vector<study_spec> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto n = static_cast<std::uint32_t>(uniform(rng, lo, hi));
        out.push_back(random_spec(m, n, rng, profile));
    }
    return out;
}

auto plan_files(modality m, std::uint64_t total_files, std::uint64_t seed, const generation_profile& profile)
    -> std::vector<study_spec> {
    std::mt19937_64 rng(mix_seed(seed, 0x9150 + static_cast<std::uint64_t>(m)));
    const auto [lo, hi] = range_for(m);
    std::vector<std::uint32_t> counts;
    std::uint64_t remaining = total_files;
    // Random draws while more than five maximal studies remain; the tail is split evenly.
    while (remaining > 5ull * hi) {
        const auto n = static_cast<std::uint32_t>(uniform(rng, lo, hi));
        counts.push_back(n);
        remaining -= n;
    }
    if (remaining > 0) {
        const auto k = (remaining + hi - 1) / hi;
        if (remaining < k * lo) {
            throw error(error_code::invalid_argument, "cannot split " + std::to_string(total_files) + " " +
                                                          to_string(m) + " files into valid studies");
        }
        for (std::uint64_t i = 0; i < k; ++i) {
            counts.push_back(static_cast<std::uint32_t>(remaining / k + (i < remaining % k ? 1 : 0)));
        }
    }
    std::vector<study_spec> out;
    for (const auto n : counts) out.push_back(random_spec(m, n, rng, profile));
    return out;
}

}  // namespace vision::synth
