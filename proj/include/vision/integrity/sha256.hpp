/**
 * @file sha256.hpp
 * @brief SHA-256 digests as lowercase hex
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace vision::integrity {

[[nodiscard]] auto hash_bytes(std::span<const std::uint8_t> data) -> std::string;
[[nodiscard]] auto hash_text(std::string_view text) -> std::string;

struct file_digest {
    std::uint64_t size{};
    std::string digest;
};

/// Streams the file; throws vision::error(io_error) naming the path.
[[nodiscard]] auto hash_file(const std::filesystem::path& path) -> file_digest;

[[nodiscard]] auto is_hex_digest(std::string_view text) -> bool;

}  // namespace vision::integrity
