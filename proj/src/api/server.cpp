/**
 * @file server.cpp
 */

#include "vision/api/server.hpp"

#include "vision/common/error.hpp"

#include <httplib.h>

namespace vision::api {

struct server::impl {
    explicit impl(service& s) : api(s) {}
    service& api;
    httplib::Server http;
};

server::server(service& api) : impl_(std::make_unique<impl>(api)) {
    const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [key, value] : req.params) query.emplace(key, value);
        const auto out = impl_->api.handle(req.method, req.path, query, req.body);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    const std::string any = std::string(prefix) + "(/.*)?";
    impl_->http.Get(any, dispatch);
    impl_->http.Post(any, dispatch);
    impl_->http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        const auto out = error_response(res.status, res.status == 404 ? "NOT_FOUND" : "HTTP_ERROR",
                                        "cannot serve " + req.method + " " + req.path);
        res.set_content(out.body, "application/json");
    });
    impl_->http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        const auto out = error_response(500, "INTERNAL", "internal error");
        res.status = out.status;
        res.set_content(out.body, "application/json");
    });
}

server::~server() = default;

auto server::bind(const std::string& host, int port) -> int {
    const int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw error(error_code::io_error, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

auto server::listen() -> bool { return impl_->http.listen_after_bind(); }

void server::stop() { impl_->http.stop(); }

}  // namespace vision::api
