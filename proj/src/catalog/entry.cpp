/**
 * @file entry.cpp
 */

#include "vision/catalog/entry.hpp"

#include "vision/common/error.hpp"

namespace vision::catalog {

auto to_string(link_status s) -> std::string_view {
    switch (s) {
        case link_status::linked: return "LINKED";
        case link_status::orphan_image: return "ORPHAN_IMAGE";
        case link_status::ambiguous: return "AMBIGUOUS";
    }
    return "ORPHAN_IMAGE";
}

auto parse_link_status(std::string_view text) -> std::optional<link_status> {
    if (text == "LINKED") return link_status::linked;
    if (text == "ORPHAN_IMAGE") return link_status::orphan_image;
    if (text == "AMBIGUOUS") return link_status::ambiguous;
    return std::nullopt;
}

auto catalog_entry::key() const -> std::string {
    if (!header.sop_uid.empty()) return header.sop_uid;
    return "path:" + batch_id + "/" + header.file_path;
}

void to_json(nlohmann::json& j, const catalog_entry& e) {
    j = e.header;
    j["digest"] = e.digest;
    j["batch_id"] = e.batch_id;
    j["ingested_at"] = e.ingested_at;
    j["link_status"] = std::string(to_string(e.link));
    j["audit_digests"] = e.audit_digests;
}

void from_json(const nlohmann::json& j, catalog_entry& e) {
    j.get_to(e.header);
    j.at("digest").get_to(e.digest);
    j.at("batch_id").get_to(e.batch_id);
    j.at("ingested_at").get_to(e.ingested_at);
    const auto link = parse_link_status(j.at("link_status").get<std::string>());
    if (!link) throw error(error_code::invalid_argument, "unknown link_status");
    e.link = *link;
    j.at("audit_digests").get_to(e.audit_digests);
}

}  // namespace vision::catalog
