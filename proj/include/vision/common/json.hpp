/**
 * @file json.hpp
 * @brief Canonical JSON text for files other tools read verbatim
 */

#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace vision {

/// Sorted keys, two-space indent, LF line endings, trailing newline.
[[nodiscard]] inline auto canonical_json(const nlohmann::json& j) -> std::string { return j.dump(2) + "\n"; }

}  // namespace vision
