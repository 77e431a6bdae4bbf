// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "pivotrl/backends.hpp"

namespace pivotrl {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // starts with '/'
};

// Splits "http://host:port/path" into origin and path. Throws InvalidArgument.
Endpoint parse_endpoint(const std::string& url);

// POSTs JSON to a provider endpoint. Transport failures are retried, for
// exactly max_retries + 1 attempts in total, with exponential backoff. An
// HTTP response of any status ends the attempt loop: non-2xx statuses and
// undecodable bodies raise ProviderUnavailable without retrying.
class HttpJsonClient {
public:
    explicit HttpJsonClient(const ProviderDescriptor& descriptor, int backoff_ms = 25);

    nlohmann::json post(const nlohmann::json& body) const;
    // True iff the origin answers HTTP at all (any status).
    bool probe() const;

    std::uint64_t attempts() const noexcept { return attempts_.load(); }

private:
    ProviderDescriptor descriptor_;
    Endpoint endpoint_;
    int backoff_ms_;
    mutable std::atomic<std::uint64_t> attempts_{0};
};

// Wire formats (canonical; an adapter may sit in between):
//   embedding            {"model","input":[..],"language"} -> {"vectors":[[..]]}
//   translation          {"model","prompt"}                -> {"text"}
//   answer_scorer        {"source","hypothesis"}           -> {"score"}
//   reference_generator  {"prompt"}                        -> {"text"}

class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(ProviderDescriptor descriptor);
    const HttpJsonClient& client() const noexcept { return client_; }

protected:
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                             std::string_view language) const override;

private:
    HttpJsonClient client_;
};

class RemoteTranslator final : public Translator {
public:
    explicit RemoteTranslator(ProviderDescriptor descriptor);
    const HttpJsonClient& client() const noexcept { return client_; }

protected:
    std::string translate_one(const std::string& text, std::string_view src, std::string_view tgt) const override;

private:
    HttpJsonClient client_;
};

// The English reference is sent as "source" and the prediction as
// "hypothesis", mirroring how COMET-style scorers are driven.
class RemoteAnswerScorer final : public AnswerScorer {
public:
    explicit RemoteAnswerScorer(ProviderDescriptor descriptor);
    const HttpJsonClient& client() const noexcept { return client_; }

protected:
    double score_pair(const std::string& predicted, const std::string& reference,
                      std::string_view pred_language) const override;

private:
    HttpJsonClient client_;
};

class RemoteReferenceGenerator final : public ReferenceGenerator {
public:
    explicit RemoteReferenceGenerator(ProviderDescriptor descriptor);
    const HttpJsonClient& client() const noexcept { return client_; }

protected:
    std::string generate_one(const std::string& prompt) const override;

private:
    HttpJsonClient client_;
};

// Reachability of a provider: deterministic backends are always reachable.
bool provider_reachable(const Provider& provider);

}  // namespace pivotrl
