/**
 * @file file_io.cpp
 */

#include "vision/common/file_io.hpp"

#include "vision/common/error.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fcntl.h>
#include <unistd.h>

namespace vision {

namespace fs = std::filesystem;

auto read_bytes(const fs::path& path) -> byte_buffer {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw error(error_code::io_error, "cannot open " + path.string());
    const auto size = in.tellg();
    byte_buffer buffer(static_cast<std::size_t>(size));
    in.seekg(0, std::ios::beg);
    if (size > 0 && !in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(size))) {
        throw error(error_code::io_error, "cannot read " + path.string());
    }
    return buffer;
}

auto read_prefix(const fs::path& path, std::size_t limit) -> byte_buffer {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(error_code::io_error, "cannot open " + path.string());
    byte_buffer buffer(limit);
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(limit));
    if (in.bad()) throw error(error_code::io_error, "cannot read " + path.string());
    buffer.resize(static_cast<std::size_t>(in.gcount()));
    return buffer;
}

auto read_text(const fs::path& path) -> std::string {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(error_code::io_error, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> data) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw error(error_code::io_error, "cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw error(error_code::io_error, "cannot write " + path.string());
}

void write_text_atomic(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error(error_code::io_error, "cannot create " + tmp.string());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) throw error(error_code::io_error, "cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

void append_durable(const fs::path& path, std::string_view block) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) throw error(error_code::io_error, "cannot open " + path.string() + ": " + std::strerror(errno));
    std::size_t written = 0;
    while (written < block.size()) {
        const auto n = ::write(fd, block.data() + written, block.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const std::string why = std::strerror(errno);
            ::close(fd);
            throw error(error_code::io_error, "write failed on " + path.string() + ": " + why);
        }
        written += static_cast<std::size_t>(n);
    }
    const bool synced = ::fsync(fd) == 0;
    ::close(fd);
    if (!synced) throw error(error_code::io_error, "fsync failed on " + path.string());
}

}  // namespace vision
