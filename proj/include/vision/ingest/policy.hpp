/**
 * @file policy.hpp
 * @brief Batch acceptance policy
 */

#pragma once

#include "vision/manifest/reconcile.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace vision {
class config;
}

namespace vision::ingest {

struct acceptance_policy {
    double max_corrupt_fraction{0.01};
    bool reject_on_missing_files{true};
    bool reject_on_digest_mismatch{true};
    bool allow_absent_manifest{true};

    /// Throws vision::error(invalid_argument) unless max_corrupt_fraction is in [0, 1].
    void validate() const;

    /// Keys policy.max_corrupt_fraction, policy.reject_on_missing_files,
    /// policy.reject_on_digest_mismatch, policy.allow_absent_manifest.
    [[nodiscard]] static auto from_config(const config& cfg) -> acceptance_policy;
};

struct gate_inputs {
    std::uint64_t file_count{};
    std::uint64_t corrupt_count{};
    const manifest::reconciliation_report* reconciliation{};
    std::optional<std::string> manifest_error;
};

/// First violated rule as a human-readable reason, or nullopt to accept.
[[nodiscard]] auto evaluate(const acceptance_policy& policy, const gate_inputs& inputs) -> std::optional<std::string>;

}  // namespace vision::ingest
