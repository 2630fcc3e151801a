/**
 * @file accession.cpp
 */

#include "vision/manifest/accession.hpp"

#include "vision/common/config.hpp"
#include "vision/common/error.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace vision::manifest {

auto normalization_rules::from_config(const config& cfg) -> normalization_rules {
    normalization_rules rules;
    rules.strip_prefixes = cfg.get_list("accession.strip_prefixes");
    rules.canonical_pattern = cfg.get_string("accession.pattern", rules.canonical_pattern);
    rules.uppercase = cfg.get_bool("accession.uppercase", rules.uppercase);
    return rules;
}

struct accession_normalizer::compiled {
    normalization_rules rules;
    std::vector<std::regex> prefixes;
    std::regex canonical;
};

accession_normalizer::accession_normalizer(normalization_rules rules) : impl_(std::make_unique<compiled>()) {
    try {
        for (const auto& p : rules.strip_prefixes) impl_->prefixes.emplace_back(p);
        impl_->canonical = std::regex(rules.canonical_pattern);
    } catch (const std::regex_error& e) {
        throw error(error_code::invalid_argument, std::string("bad accession pattern: ") + e.what());
    }
    impl_->rules = std::move(rules);
}

accession_normalizer::~accession_normalizer() = default;
accession_normalizer::accession_normalizer(accession_normalizer&&) noexcept = default;
accession_normalizer& accession_normalizer::operator=(accession_normalizer&&) noexcept = default;

auto accession_normalizer::rules() const -> const normalization_rules& { return impl_->rules; }

auto accession_normalizer::normalize(std::string_view raw) const -> normalized_accession {
    normalized_accession out;
    out.normalized.assign(raw);
    if (impl_->rules.uppercase) {
        std::transform(out.normalized.begin(), out.normalized.end(), out.normalized.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    }

    // Strip to a fixed point so normalization is idempotent.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& re : impl_->prefixes) {
            std::smatch m;
            if (std::regex_search(out.normalized, m, re, std::regex_constants::match_continuous) && m.length(0) > 0) {
                out.normalized.erase(0, static_cast<std::size_t>(m.length(0)));
                changed = true;
            }
        }
    }

    if (!std::regex_match(out.normalized, impl_->canonical)) {
        out.violations.push_back("'" + out.normalized + "' does not match " + impl_->rules.canonical_pattern);
    }
    return out;
}

auto normalize_accession(std::string_view raw, const normalization_rules& rules) -> normalized_accession {
    return accession_normalizer(rules).normalize(raw);
}

}  // namespace vision::manifest
