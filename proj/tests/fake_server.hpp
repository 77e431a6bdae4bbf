// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace pivotrl::testing {

// A local HTTP server standing in for a remote model endpoint. Every POST is
// recorded; the reply comes from `respond`.
class FakeServer {
public:
    struct Seen {
        std::string path;
        nlohmann::json body;
        std::string authorization;
    };
    using Responder = std::function<void(const nlohmann::json& body, httplib::Response& res)>;

    explicit FakeServer(Responder respond) : respond_(std::move(respond)) {
        server_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body, nullptr, false);
            {
                std::lock_guard lock(mutex_);
                seen_.push_back({req.path, body, req.get_header_value("Authorization")});
            }
            respond_(body, res);
        });
        server_.Get("/health", [](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeServer() {
        server_.stop();
        thread_.join();
    }

    int port() const { return port_; }
    std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }
    std::vector<Seen> seen() const {
        std::lock_guard lock(mutex_);
        return seen_;
    }

    static void reply(httplib::Response& res, const nlohmann::json& j, int status = 200) {
        res.status = status;
        res.set_content(j.dump(), "application/json");
    }

private:
    Responder respond_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::vector<Seen> seen_;
};

// A port that was just bound and released, so nothing listens on it.
inline int closed_port() {
    httplib::Server s;
    const int port = s.bind_to_any_port("127.0.0.1");
    s.stop();
    return port;
}

}  // namespace pivotrl::testing
