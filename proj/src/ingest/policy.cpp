/**
 * @file policy.cpp
 */

#include "vision/ingest/policy.hpp"

#include "vision/common/config.hpp"
#include "vision/common/error.hpp"

#include <cstdio>

namespace vision::ingest {

namespace {

auto list_prefix(const std::vector<std::string>& items) -> std::string {
    constexpr std::size_t shown = 5;
    std::string out;
    for (std::size_t i = 0; i < items.size() && i < shown; ++i) out += (i ? ", " : "") + items[i];
    if (items.size() > shown) out += " (+" + std::to_string(items.size() - shown) + " more)";
    return out;
}

}  // namespace

void acceptance_policy::validate() const {
    if (!(max_corrupt_fraction >= 0.0 && max_corrupt_fraction <= 1.0)) {
        throw error(error_code::invalid_argument, "policy.max_corrupt_fraction must lie in [0, 1]");
    }
}

auto acceptance_policy::from_config(const config& cfg) -> acceptance_policy {
    acceptance_policy p;
    p.max_corrupt_fraction = cfg.get_double("policy.max_corrupt_fraction", p.max_corrupt_fraction);
    p.reject_on_missing_files = cfg.get_bool("policy.reject_on_missing_files", p.reject_on_missing_files);
    p.reject_on_digest_mismatch = cfg.get_bool("policy.reject_on_digest_mismatch", p.reject_on_digest_mismatch);
    p.allow_absent_manifest = cfg.get_bool("policy.allow_absent_manifest", p.allow_absent_manifest);
    p.validate();
    return p;
}

auto evaluate(const acceptance_policy& policy, const gate_inputs& in) -> std::optional<std::string> {
    if (in.file_count == 0) return "batch contains no files";
    if (in.manifest_error) return "manifest invalid: " + *in.manifest_error;
    const auto* r = in.reconciliation;
    if (r != nullptr) {
        if (!r->manifest_present && !policy.allow_absent_manifest) return std::string("manifests absent");
        if (policy.reject_on_missing_files && !r->missing_files.empty()) {
            return "missing files: " + list_prefix(r->missing_files);
        }
        if (policy.reject_on_digest_mismatch && !r->digest_mismatches.empty()) {
            return "digest mismatches: " + list_prefix(r->digest_mismatches);
        }
    }
    const double fraction = static_cast<double>(in.corrupt_count) / static_cast<double>(in.file_count);
    if (fraction > policy.max_corrupt_fraction) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "corrupt fraction %.4f exceeds %.4f", fraction, policy.max_corrupt_fraction);
        return std::string(buf);
    }
    return std::nullopt;
}

}  // namespace vision::ingest
