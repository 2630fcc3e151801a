/**
 * @file config.cpp
 */

#include "vision/common/config.hpp"

#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"

#include <charconv>
#include <cstdlib>

namespace vision {

namespace {

auto trim(std::string_view s) -> std::string {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

auto config::parse(std::string_view text) -> config {
    config cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        const auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw error(error_code::invalid_argument,
                        "config line " + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) {
            throw error(error_code::invalid_argument, "config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.set(std::move(key), trim(std::string_view(line).substr(eq + 1)));
    }
    return cfg;
}

auto config::load(const std::filesystem::path& path) -> config { return parse(read_text(path)); }

void config::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

auto config::contains(const std::string& key) const -> bool { return values_.count(key) != 0; }

auto config::get(const std::string& key) const -> std::optional<std::string> {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

auto config::get_string(const std::string& key, std::string fallback) const -> std::string {
    return get(key).value_or(std::move(fallback));
}

auto config::get_double(const std::string& key, double fallback) const -> double {
    const auto v = get(key);
    if (!v) return fallback;
    char* end = nullptr;
    const double d = std::strtod(v->c_str(), &end);
    if (v->empty() || end != v->c_str() + v->size()) {
        throw error(error_code::invalid_argument, "config " + key + ": not a number: " + *v);
    }
    return d;
}

auto config::get_u64(const std::string& key, std::uint64_t fallback) const -> std::uint64_t {
    const auto v = get(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size() || v->empty()) {
        throw error(error_code::invalid_argument, "config " + key + ": not an unsigned integer: " + *v);
    }
    return out;
}

auto config::get_bool(const std::string& key, bool fallback) const -> bool {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw error(error_code::invalid_argument, "config " + key + ": not a boolean: " + *v);
}

auto config::get_list(const std::string& key) const -> std::vector<std::string> {
    std::vector<std::string> out;
    const auto v = get(key);
    if (!v) return out;
    std::string_view rest = *v;
    while (true) {
        const auto comma = rest.find(',');
        auto item = trim(rest.substr(0, comma));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

}  // namespace vision
