/**
 * @file server.hpp
 * @brief HTTP transport for api::service
 */

#pragma once

#include "vision/api/service.hpp"

#include <memory>
#include <string>

namespace vision::api {

class server {
public:
    explicit server(service& api);
    ~server();
    server(const server&) = delete;
    server& operator=(const server&) = delete;

    /// Binds `host:port` (port 0 picks a free one) and returns the bound port; throws io_error on failure.
    auto bind(const std::string& host, int port) -> int;
    /// Serves until stop(); returns false if the listener failed.
    auto listen() -> bool;
    void stop();

private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

}  // namespace vision::api
