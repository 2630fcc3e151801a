/**
 * @file study.hpp
 * @brief Synthetic DICOM studies
 *
 * A CR study has two base views (FRONT, SIDE) and its remaining files are
 * derived versions alternating the same views. An MR study has one series
 * per 200 images. Every file ends with a small pseudo-random payload under
 * (7FE0,0010).
 */

#pragma once

#include "vision/dicom/element.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vision {
class config;
}

namespace vision::synth {

enum class modality { cr, mr };

[[nodiscard]] auto to_string(modality m) -> std::string;

struct study_spec {
    synth::modality modality{modality::cr};
    std::string accession_number;
    std::string patient_id;
    std::string study_date;  ///< YYYYMMDD
    std::uint32_t file_count{};
    std::string manufacturer{"ACME"};

    bool operator==(const study_spec&) const = default;
};

inline constexpr std::uint32_t cr_min_files = 6;
inline constexpr std::uint32_t cr_max_files = 8;
inline constexpr std::uint32_t mr_min_files = 200;
inline constexpr std::uint32_t mr_max_files = 1600;

/// Throws vision::error(invalid_argument) when file_count is outside the modality's range or a field is empty.
void validate(const study_spec& spec);

struct generation_profile {
    std::vector<std::string> manufacturers{"ACME"};
    std::vector<double> manufacturer_weights;  ///< empty means uniform
    std::uint32_t cr_payload_bytes{512};
    std::uint32_t mr_payload_bytes{128};

    /// Keys generation.manufacturers, generation.manufacturer_weights, generation.cr_payload_bytes, generation.mr_payload_bytes.
    [[nodiscard]] static auto from_config(const config& cfg) -> generation_profile;
};

struct generated_file {
    std::string path;  ///< relative to the batch root
    std::string sop_uid;
    std::vector<std::uint8_t> bytes;
    std::size_t pixel_offset{};  ///< where the (7FE0,0010) element header starts
};

/// Study UID a study generated from `seed` carries.
[[nodiscard]] auto study_uid_for(std::uint64_t seed) -> std::string;

/// Element list of instance `index` (0-based); indexes past file_count give extra instances of the same study.
[[nodiscard]] auto instance_elements(const study_spec& spec, std::uint64_t seed, std::uint32_t index,
                                     const generation_profile& profile = {}) -> std::vector<dicom::data_element>;

[[nodiscard]] auto generate_instance(const study_spec& spec, std::uint64_t seed, std::uint32_t index,
                                     const generation_profile& profile = {}) -> generated_file;

/// Deterministic in (spec, seed, profile). Validates the spec first.
[[nodiscard]] auto generate_study(const study_spec& spec, std::uint64_t seed, const generation_profile& profile = {})
    -> std::vector<generated_file>;

/// Random studies of one modality; manufacturer draws follow the profile weights.
[[nodiscard]] auto plan_studies(modality m, std::size_t count, std::uint64_t seed,
                                const generation_profile& profile = {}) -> std::vector<study_spec>;

/**
 * @brief Studies of one modality whose file counts sum to exactly `total_files`.
 *
 * Throws vision::error(invalid_argument) when no valid split exists.
 */
[[nodiscard]] auto plan_files(modality m, std::uint64_t total_files, std::uint64_t seed,
                              const generation_profile& profile = {}) -> std::vector<study_spec>;

/// SplitMix64 finalizer; derives independent sub-seeds.
[[nodiscard]] auto mix_seed(std::uint64_t seed, std::uint64_t salt) -> std::uint64_t;

}  // namespace vision::synth
