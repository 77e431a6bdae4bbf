// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "json.hpp"
#include "pivotrl/config.hpp"
#include "pivotrl/reward.hpp"

namespace httplib {
class Server;
}

namespace pivotrl {

struct HttpReply {
    int status = 200;
    nlohmann::json body;
};

nlohmann::json breakdown_to_json(const RewardBreakdown& b);
RewardBreakdown breakdown_from_json(const nlohmann::json& j);

int http_status_for(ErrorKind kind);

// Request handling is independent of the HTTP transport so it can be driven
// directly; serve() wires it to an httplib server.
class ScoringService {
public:
    ScoringService(AppConfig config, ProviderRuntime runtime);
    ~ScoringService();
    ScoringService(const ScoringService&) = delete;
    ScoringService& operator=(const ScoringService&) = delete;

    const AppConfig& config() const noexcept { return config_; }
    const RewardEngine& engine() const noexcept { return engine_; }

    HttpReply score(std::string_view body) const;
    HttpReply score_batch(std::string_view body) const;
    HttpReply health() const;
    HttpReply active_config() const;

    // Routes a request, applying the size limit and the concurrency limit to
    // the scoring endpoints.
    HttpReply handle(std::string_view method, std::string_view path, std::string_view body) const;

    // A held slot counts against max_concurrent until released.
    class Slot {
    public:
        explicit Slot(const ScoringService* owner) : owner_(owner) {}
        Slot(Slot&& other) noexcept : owner_(std::exchange(other.owner_, nullptr)) {}
        Slot& operator=(Slot&&) = delete;
        ~Slot() {
            if (owner_ != nullptr) owner_->in_flight_.fetch_sub(1);
        }

    private:
        const ScoringService* owner_;
    };
    std::optional<Slot> try_acquire() const;

    // Binds (port 0 picks a free port) and returns the bound port.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void listen();
    void stop();

private:
    RewardConfig resolve_mode(const nlohmann::json& request) const;

    AppConfig config_;
    ProviderRuntime runtime_;
    RewardEngine engine_;
    mutable std::atomic<int> in_flight_{0};
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace pivotrl
