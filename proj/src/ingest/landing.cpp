/**
 * @file landing.cpp
 */

#include "vision/ingest/landing.hpp"

#include "vision/common/error.hpp"
#include "vision/common/layout.hpp"

#include <cerrno>
#include <cstring>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace vision::ingest {

auto landing_paths::report_relative(const std::string& id, const std::string& name) -> std::string {
    return std::string(layout::reports_dir) + "/" + id + "." + name + ".json";
}

auto landing_paths::report(const std::string& id, const std::string& name) const -> std::filesystem::path {
    return batch_dir(id) / report_relative(id, name);
}

auto landing_paths::lock_path() const -> std::filesystem::path { return root / std::string(layout::lock_file); }

landing_lock::landing_lock(const std::filesystem::path& landing) {
    std::filesystem::create_directories(landing);
    const auto path = landing_paths{landing}.lock_path();
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw error(error_code::io_error, "cannot open " + path.string() + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw error(error_code::lock_held, "landing zone " + landing.string() + " is locked by another process");
    }
}

landing_lock::~landing_lock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

}  // namespace vision::ingest
