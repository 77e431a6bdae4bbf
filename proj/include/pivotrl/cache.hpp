// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "json.hpp"
#include "pivotrl/backends.hpp"

namespace pivotrl {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::string_view bytes);
std::string to_hex(const Digest& digest);

// Compact JSON with lexicographically sorted object keys, so two requests
// that differ only in field insertion order serialize to the same bytes.
std::string canonical_json(const nlohmann::json& value);

struct CacheKey {
    std::string provider_id;
    Digest content_hash{};

    std::string hex() const { return to_hex(content_hash); }
    bool operator==(const CacheKey&) const = default;
};

CacheKey make_cache_key(std::string provider_id, const nlohmann::json& request);

struct CacheSettings {
    bool enabled = true;
    std::optional<std::filesystem::path> directory;  // write-through store
};

// In-memory map from CacheKey to a JSON value, optionally mirrored to
// <directory>/<provider_id>/<sha256>.json. Values for equal keys are equal by
// construction, so concurrent writers simply race to store the same value.
class ContentCache {
public:
    explicit ContentCache(CacheSettings settings = {});

    bool enabled() const noexcept { return settings_.enabled; }
    const CacheSettings& settings() const noexcept { return settings_; }

    std::optional<nlohmann::json> get(const CacheKey& key) const;
    void put(const CacheKey& key, const nlohmann::json& value);
    std::size_t size() const;

private:
    std::filesystem::path file_for(const CacheKey& key) const;

    CacheSettings settings_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<std::string, nlohmann::json> entries_;
};

// Returns the cached value for `key`, or runs `compute`, stores and returns
// its result. With the cache disabled this is just `compute()`.
template <typename T, typename Compute>
T cached(ContentCache& cache, const CacheKey& key, Compute&& compute) {
    if (!cache.enabled()) return compute();
    if (auto hit = cache.get(key)) return hit->template get<T>();
    T value = compute();
    cache.put(key, nlohmann::json(value));
    return value;
}

// Decorators that put a ContentCache in front of a provider. The wrapped
// provider's calls() counts real backend invocations.
class CachingEmbedder final : public Embedder {
public:
    CachingEmbedder(std::shared_ptr<const Embedder> inner, std::shared_ptr<ContentCache> cache);

protected:
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                             std::string_view language) const override;

private:
    std::shared_ptr<const Embedder> inner_;
    std::shared_ptr<ContentCache> cache_;
};

class CachingTranslator final : public Translator {
public:
    CachingTranslator(std::shared_ptr<const Translator> inner, std::shared_ptr<ContentCache> cache);

protected:
    std::string translate_one(const std::string& text, std::string_view src, std::string_view tgt) const override;

private:
    std::shared_ptr<const Translator> inner_;
    std::shared_ptr<ContentCache> cache_;
};

class CachingAnswerScorer final : public AnswerScorer {
public:
    CachingAnswerScorer(std::shared_ptr<const AnswerScorer> inner, std::shared_ptr<ContentCache> cache);

protected:
    double score_pair(const std::string& predicted, const std::string& reference,
                      std::string_view pred_language) const override;

private:
    std::shared_ptr<const AnswerScorer> inner_;
    std::shared_ptr<ContentCache> cache_;
};

class CachingReferenceGenerator final : public ReferenceGenerator {
public:
    CachingReferenceGenerator(std::shared_ptr<const ReferenceGenerator> inner, std::shared_ptr<ContentCache> cache);

protected:
    std::string generate_one(const std::string& prompt) const override;

private:
    std::shared_ptr<const ReferenceGenerator> inner_;
    std::shared_ptr<ContentCache> cache_;
};

// Wraps every non-null provider of the set. A disabled cache returns the set
// unchanged.
ProviderSet with_cache(const ProviderSet& providers, std::shared_ptr<ContentCache> cache);

}  // namespace pivotrl
