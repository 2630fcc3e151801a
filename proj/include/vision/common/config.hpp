/**
 * @file config.hpp
 * @brief key = value configuration files
 *
 * One setting per line, `#` starts a comment line, keys are dotted names
 * such as `extraction.business_hours_rate`. Repeated keys keep the last value.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vision {

class config {
public:
    config() = default;

    /// Throws vision::error(invalid_argument) naming the line on malformed input.
    [[nodiscard]] static auto parse(std::string_view text) -> config;
    [[nodiscard]] static auto load(const std::filesystem::path& path) -> config;

    void set(std::string key, std::string value);
    [[nodiscard]] auto contains(const std::string& key) const -> bool;
    [[nodiscard]] auto get(const std::string& key) const -> std::optional<std::string>;

    [[nodiscard]] auto get_string(const std::string& key, std::string fallback) const -> std::string;
    [[nodiscard]] auto get_double(const std::string& key, double fallback) const -> double;
    [[nodiscard]] auto get_u64(const std::string& key, std::uint64_t fallback) const -> std::uint64_t;
    [[nodiscard]] auto get_bool(const std::string& key, bool fallback) const -> bool;
    /// Comma-separated list; empty items are dropped.
    [[nodiscard]] auto get_list(const std::string& key) const -> std::vector<std::string>;

    [[nodiscard]] auto entries() const -> const std::map<std::string, std::string>& { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace vision
