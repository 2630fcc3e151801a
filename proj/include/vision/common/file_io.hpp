/**
 * @file file_io.hpp
 * @brief Whole-file read/write helpers
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vision {

using byte_buffer = std::vector<std::uint8_t>;

/// Throws vision::error(io_error) naming the path on failure.
[[nodiscard]] auto read_bytes(const std::filesystem::path& path) -> byte_buffer;

/// Reads at most `limit` bytes from the start of the file.
[[nodiscard]] auto read_prefix(const std::filesystem::path& path, std::size_t limit) -> byte_buffer;

[[nodiscard]] auto read_text(const std::filesystem::path& path) -> std::string;

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data);

/// Writes via a temporary sibling and rename, so readers see old or new content only.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

/// Appends with O_APPEND and fsyncs before returning.
void append_durable(const std::filesystem::path& path, std::string_view block);

}  // namespace vision
