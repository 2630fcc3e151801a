// Shared helpers for the test binaries.

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace vision::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class temp_dir {
public:
    explicit temp_dir(const std::string& label = "vision") {
        std::random_device rd;
        const auto stamp = std::to_string(rd()) + std::to_string(rd());
        path_ = std::filesystem::temp_directory_path() / (label + "-" + stamp);
        std::filesystem::create_directories(path_);
    }
    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    temp_dir(const temp_dir&) = delete;
    temp_dir& operator=(const temp_dir&) = delete;

    [[nodiscard]] auto path() const -> const std::filesystem::path& { return path_; }
    [[nodiscard]] auto operator/(const std::string& child) const -> std::filesystem::path { return path_ / child; }

private:
    std::filesystem::path path_;
};

}  // namespace vision::testing
