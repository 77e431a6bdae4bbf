// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/service.hpp"

#include <chrono>
#include <stdexcept>
#include <thread>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "httplib.h"
#include "pivotrl/error.hpp"
#include "pivotrl/remote.hpp"

namespace pivotrl {

namespace {

using nlohmann::json;

struct BadRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json error_body(std::string_view kind, std::string_view message) {
    return json{{"error", {{"kind", kind}, {"message", message}}}};
}

const json& member(const json& j, const char* key, json::value_t type, const char* where) {
    if (!j.is_object() || !j.contains(key)) throw BadRequest(std::string(where) + " lacks '" + key + "'");
    const auto& v = j.at(key);
    if (v.type() != type) throw BadRequest(std::string(where) + "." + key + " has the wrong type");
    return v;
}

ScorePair parse_pair(const json& j, std::string_view pivot) {
    if (!j.is_object()) throw BadRequest("pair must be an object");
    const auto& pred = member(j, "prediction", json::value_t::object, "pair");
    const auto& ref = member(j, "reference", json::value_t::object, "pair");
    RawResponse raw{member(pred, "text", json::value_t::string, "prediction").get<std::string>(),
                    member(pred, "language", json::value_t::string, "prediction").get<std::string>()};
    if (raw.language.empty()) throw BadRequest("prediction.language must be non-empty");
    const auto reasoning = member(ref, "reasoning", json::value_t::string, "reference").get<std::string>();
    const auto answer = member(ref, "answer", json::value_t::string, "reference").get<std::string>();
    return ScorePair{parse_response(raw), make_reference(reasoning, answer, pivot)};
}

json parse_body(std::string_view body) {
    try {
        auto j = json::parse(body);
        if (!j.is_object()) throw BadRequest("request body must be a JSON object");
        return j;
    } catch (const json::parse_error&) {
        throw BadRequest("request body is not valid JSON");
    }
}

std::shared_ptr<spdlog::logger> request_logger() {
    static const auto logger = [] {
        auto l = std::make_shared<spdlog::logger>("pivotrl.requests", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        l->set_pattern("%v");
        return l;
    }();
    return logger;
}

}  // namespace

json breakdown_to_json(const RewardBreakdown& b) {
    return json{{"r_answer", b.r_answer}, {"r_embed", b.r_embed},         {"r_trans_emb", b.r_trans_emb},
                {"r_fmt", b.r_fmt},       {"r_reasoning", b.r_reasoning}, {"total", b.total}};
}

RewardBreakdown breakdown_from_json(const json& j) {
    RewardBreakdown b;
    j.at("r_answer").get_to(b.r_answer);
    j.at("r_embed").get_to(b.r_embed);
    j.at("r_trans_emb").get_to(b.r_trans_emb);
    j.at("r_fmt").get_to(b.r_fmt);
    j.at("r_reasoning").get_to(b.r_reasoning);
    j.at("total").get_to(b.total);
    return b;
}

int http_status_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidReference:
        case ErrorKind::UnknownLanguage: return 422;
        case ErrorKind::InvalidArgument: return 400;
        case ErrorKind::ProviderUnavailable:
        case ErrorKind::DimensionDrift:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::ZeroNormVector:
        case ErrorKind::RecordRejected: return 502;
        default: return 500;
    }
}

ScoringService::ScoringService(AppConfig config, ProviderRuntime runtime)
    : config_(std::move(config)),
      runtime_(std::move(runtime)),
      engine_(runtime_.providers, preset_config(config_.mode, config_.pivot)) {}

ScoringService::~ScoringService() { stop(); }

RewardConfig ScoringService::resolve_mode(const json& request) const {
    if (!request.contains("mode") || request.at("mode").is_null()) return engine_.default_config();
    if (!request.at("mode").is_string()) throw BadRequest("mode must be a string");
    const auto name = request.at("mode").get<std::string>();
    if (find_preset(name) == nullptr) throw BadRequest("unknown mode '" + name + "'");
    return preset_config(name, config_.pivot);
}

HttpReply ScoringService::score(std::string_view body) const {
    try {
        const auto request = parse_body(body);
        const auto config = resolve_mode(request);
        const auto pair = parse_pair(request, config_.pivot);
        return {200, breakdown_to_json(engine_.score(pair.prediction, pair.reference, config))};
    } catch (const BadRequest& e) {
        return {400, error_body("BadRequest", e.what())};
    } catch (const Error& e) {
        return {http_status_for(e.kind()), error_body(to_string(e.kind()), e.detail())};
    }
}

HttpReply ScoringService::score_batch(std::string_view body) const {
    try {
        const auto request = parse_body(body);
        const auto config = resolve_mode(request);
        const auto& items = member(request, "pairs", json::value_t::array, "request");
        std::vector<ScorePair> pairs;
        pairs.reserve(items.size());
        for (const auto& item : items) pairs.push_back(parse_pair(item, config_.pivot));

        json results = json::array();
        int failed = 0;
        for (const auto& outcome : engine_.score_batch(pairs, config)) {
            if (const auto* b = std::get_if<RewardBreakdown>(&outcome)) {
                results.push_back(breakdown_to_json(*b));
            } else {
                const auto& err = std::get<ItemError>(outcome);
                results.push_back(error_body(to_string(err.kind), err.message));
                ++failed;
            }
        }
        return {200, json{{"results", std::move(results)}, {"failed", failed}}};
    } catch (const BadRequest& e) {
        return {400, error_body("BadRequest", e.what())};
    } catch (const Error& e) {
        return {http_status_for(e.kind()), error_body(to_string(e.kind()), e.detail())};
    }
}

HttpReply ScoringService::health() const {
    json providers = json::object();
    bool all_ok = true;
    for (const auto& p : runtime_.base) {
        if (!p) continue;
        const bool ok = provider_reachable(*p);
        all_ok = all_ok && ok;
        providers[std::string(to_string(p->descriptor().kind))] = {
            {"id", p->id()}, {"remote", p->descriptor().is_remote()}, {"status", ok ? "ok" : "degraded"}};
    }
    return {200, json{{"status", all_ok ? "ok" : "degraded"}, {"providers", std::move(providers)}}};
}

HttpReply ScoringService::active_config() const { return {200, redacted_json(config_)}; }

std::optional<ScoringService::Slot> ScoringService::try_acquire() const {
    if (in_flight_.fetch_add(1) >= config_.service.max_concurrent) {
        in_flight_.fetch_sub(1);
        return std::nullopt;
    }
    return Slot(this);
}

HttpReply ScoringService::handle(std::string_view method, std::string_view path, std::string_view body) const {
    if (method == "GET" && path == "/health") return health();
    if (method == "GET" && path == "/config") return active_config();
    const bool single = path == "/v1/score";
    const bool batch = path == "/v1/score_batch";
    if (!single && !batch) return {404, error_body("NotFound", "no route for " + std::string(path))};
    if (method != "POST") return {405, error_body("MethodNotAllowed", "use POST")};
    if (body.size() > config_.service.max_body_bytes) {
        return {400, error_body("BadRequest", "request body exceeds " + std::to_string(config_.service.max_body_bytes) +
                                                  " bytes")};
    }
    auto slot = try_acquire();
    if (!slot) return {503, error_body("AtCapacity", "too many concurrent requests")};
    return single ? score(body) : score_batch(body);
}

int ScoringService::bind(const std::string& host, int port) {
    server_ = std::make_unique<httplib::Server>();
    const auto threads = static_cast<std::size_t>(config_.service.max_concurrent) + 4;
    server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    // Bodies past the limit still get a JSON 400 from handle(); httplib only
    // guards against unbounded reads.
    server_->set_payload_max_length(config_.service.max_body_bytes * 4 + 1024);

    auto route = [this](const httplib::Request& req, httplib::Response& res) {
        const auto start = std::chrono::steady_clock::now();
        const auto reply = handle(req.method, req.path, req.body);
        res.status = reply.status;
        res.set_content(reply.body.dump(), "application/json");
        if (config_.service.log_requests) {
            const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            request_logger()->info(json{{"method", req.method},
                                        {"path", req.path},
                                        {"status", reply.status},
                                        {"bytes_in", req.body.size()},
                                        {"latency_ms", ms},
                                        {"remote", req.remote_addr}}
                                       .dump());
        }
    };
    // Every route answers every method so status codes match handle().
    for (const char* path : {"/health", "/config", "/v1/score", "/v1/score_batch"}) {
        server_->Get(path, route);
        server_->Post(path, route);
        server_->Put(path, route);
        server_->Delete(path, route);
    }

    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorKind::IoFailure, "cannot bind " + host);
        return bound;
    }
    if (!server_->bind_to_port(host, port)) {
        throw Error(ErrorKind::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void ScoringService::listen() {
    if (!server_) throw Error(ErrorKind::InvalidArgument, "bind() before listen()");
    server_->listen_after_bind();
}

void ScoringService::stop() {
    if (server_) server_->stop();
}

}  // namespace pivotrl
