// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/remote.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"
#include "pivotrl/error.hpp"
#include "pivotrl/languages.hpp"

namespace pivotrl {

Endpoint parse_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.compare(0, scheme_end, "http") != 0) {
        throw Error(ErrorKind::InvalidArgument, "endpoint must be an http:// URL: " + url);
    }
    const auto path_begin = url.find('/', scheme_end + 3);
    Endpoint ep;
    ep.origin = url.substr(0, path_begin);
    ep.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
    if (ep.origin.size() <= scheme_end + 3) throw Error(ErrorKind::InvalidArgument, "endpoint has no host: " + url);
    return ep;
}

HttpJsonClient::HttpJsonClient(const ProviderDescriptor& descriptor, int backoff_ms)
    : descriptor_(descriptor), backoff_ms_(backoff_ms) {
    if (!descriptor_.endpoint) throw Error(ErrorKind::InvalidArgument, descriptor_.id + ": remote provider needs an endpoint");
    endpoint_ = parse_endpoint(*descriptor_.endpoint);
}

nlohmann::json HttpJsonClient::post(const nlohmann::json& body) const {
    httplib::Client cli(endpoint_.origin);
    const auto timeout = std::chrono::milliseconds(descriptor_.timeout_ms);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    httplib::Headers headers;
    if (descriptor_.bearer_token) headers.emplace("Authorization", "Bearer " + *descriptor_.bearer_token);

    const std::string payload = body.dump();
    const int total_attempts = descriptor_.max_retries + 1;
    std::string last_error;
    for (int attempt = 0; attempt < total_attempts; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms_ << (attempt - 1)));
        attempts_.fetch_add(1);
        auto res = cli.Post(endpoint_.path, headers, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw Error(ErrorKind::ProviderUnavailable,
                        descriptor_.id + " answered HTTP " + std::to_string(res->status) + ": " + res->body);
        }
        auto decoded = nlohmann::json::parse(res->body, nullptr, false);
        if (decoded.is_discarded() || !decoded.is_object()) {
            throw Error(ErrorKind::ProviderUnavailable, descriptor_.id + " returned a non-JSON body");
        }
        return decoded;
    }
    throw Error(ErrorKind::ProviderUnavailable, descriptor_.id + " unreachable after " +
                                                    std::to_string(total_attempts) + " attempts: " + last_error);
}

bool HttpJsonClient::probe() const {
    httplib::Client cli(endpoint_.origin);
    const auto timeout = std::chrono::milliseconds(std::min(descriptor_.timeout_ms, 2000));
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    return static_cast<bool>(cli.Get("/health"));
}

namespace {

template <typename T>
T field(const nlohmann::json& body, const char* name, const std::string& provider) {
    if (!body.contains(name)) throw Error(ErrorKind::ProviderUnavailable, provider + " response lacks '" + name + "'");
    try {
        return body.at(name).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ProviderUnavailable, provider + " response field '" + name + "': " + e.what());
    }
}

std::string model_field(const ProviderDescriptor& d) { return d.model_name.value_or(d.id); }

}  // namespace

RemoteEmbedder::RemoteEmbedder(ProviderDescriptor descriptor) : Embedder(descriptor), client_(descriptor) {}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts,
                                                         std::string_view language) const {
    nlohmann::json request = {{"model", model_field(descriptor())},
                              {"input", std::vector<std::string>(texts.begin(), texts.end())},
                              {"language", language}};
    auto vectors = field<std::vector<std::vector<double>>>(client_.post(request), "vectors", id());
    std::vector<EmbeddingVector> out;
    out.reserve(vectors.size());
    for (auto& v : vectors) {
        try {
            out.emplace_back(std::move(v));
        } catch (const Error& e) {
            throw Error(ErrorKind::ProviderUnavailable, id() + " returned an invalid vector: " + e.what());
        }
    }
    return out;
}

RemoteTranslator::RemoteTranslator(ProviderDescriptor descriptor) : Translator(descriptor), client_(descriptor) {}

std::string RemoteTranslator::translate_one(const std::string& text, std::string_view src, std::string_view tgt) const {
    if (!language_name(src)) throw Error(ErrorKind::UnknownLanguage, "no display name for '" + std::string(src) + "'");
    nlohmann::json request = {{"model", model_field(descriptor())}, {"prompt", translation_prompt(text, tgt)}};
    return field<std::string>(client_.post(request), "text", id());
}

RemoteAnswerScorer::RemoteAnswerScorer(ProviderDescriptor descriptor) : AnswerScorer(descriptor), client_(descriptor) {}

double RemoteAnswerScorer::score_pair(const std::string& predicted, const std::string& reference,
                                      std::string_view /*pred_language*/) const {
    nlohmann::json request = {{"source", reference}, {"hypothesis", predicted}};
    return field<double>(client_.post(request), "score", id());
}

RemoteReferenceGenerator::RemoteReferenceGenerator(ProviderDescriptor descriptor)
    : ReferenceGenerator(descriptor), client_(descriptor) {}

std::string RemoteReferenceGenerator::generate_one(const std::string& prompt) const {
    return field<std::string>(client_.post({{"prompt", prompt}}), "text", id());
}

bool provider_reachable(const Provider& provider) {
    if (!provider.descriptor().is_remote()) return true;
    try {
        return HttpJsonClient(provider.descriptor()).probe();
    } catch (const Error&) {
        return false;
    }
}

}  // namespace pivotrl
