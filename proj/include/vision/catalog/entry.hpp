/**
 * @file entry.hpp
 * @brief Catalog entries: scanned header fields plus digest, batch and link status
 */

#pragma once

#include "vision/dicom/header.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace vision::catalog {

enum class link_status { linked, orphan_image, ambiguous };

[[nodiscard]] auto to_string(link_status s) -> std::string_view;
[[nodiscard]] auto parse_link_status(std::string_view text) -> std::optional<link_status>;

struct catalog_entry {
    dicom::header_record header;
    std::string digest;
    std::string batch_id;
    std::string ingested_at;
    link_status link{link_status::orphan_image};
    /// Every digest ever seen for this key once a conflict occurred.
    std::vector<std::string> audit_digests;

    bool operator==(const catalog_entry&) const = default;

    /// SOP Instance UID; files without one (CORRUPT) are keyed by batch and path.
    [[nodiscard]] auto key() const -> std::string;
};

void to_json(nlohmann::json& j, const catalog_entry& e);
void from_json(const nlohmann::json& j, catalog_entry& e);

}  // namespace vision::catalog
