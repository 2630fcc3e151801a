/**
 * @file accession.hpp
 * @brief Accession-number normalization
 *
 * Upstream systems sometimes prepend letters or digits to accession numbers;
 * configured prefix patterns undo that before values are compared or joined.
 */

#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace vision {
class config;
}

namespace vision::manifest {

struct normalization_rules {
    /// ECMAScript regexes matched at the start of the value, applied in order until none matches.
    std::vector<std::string> strip_prefixes;
    std::string canonical_pattern{"[A-Z0-9]{4,16}"};
    bool uppercase{true};

    /// Reads accession.strip_prefixes / accession.pattern / accession.uppercase.
    [[nodiscard]] static auto from_config(const config& cfg) -> normalization_rules;
};

struct normalized_accession {
    std::string normalized;
    std::vector<std::string> violations;  ///< non-empty iff normalized fails the canonical pattern
};

/// Rules with their patterns compiled once, for bulk use.
class accession_normalizer {
public:
    /// Throws vision::error(invalid_argument) for an invalid pattern.
    explicit accession_normalizer(normalization_rules rules);
    ~accession_normalizer();
    accession_normalizer(accession_normalizer&&) noexcept;
    accession_normalizer& operator=(accession_normalizer&&) noexcept;

    [[nodiscard]] auto normalize(std::string_view raw) const -> normalized_accession;
    [[nodiscard]] auto rules() const -> const normalization_rules&;

private:
    struct compiled;
    std::unique_ptr<compiled> impl_;
};

[[nodiscard]] auto normalize_accession(std::string_view raw, const normalization_rules& rules) -> normalized_accession;

}  // namespace vision::manifest
