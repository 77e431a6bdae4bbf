// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/cache.hpp"

#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "pivotrl/error.hpp"

namespace pivotrl {

Digest sha256(std::string_view bytes) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
        throw Error(ErrorKind::InvalidArgument, "sha256 failed");
    }
    return out;
}

std::string to_hex(const Digest& digest) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (auto b : digest) {
        out += kHex[b >> 4];
        out += kHex[b & 0xF];
    }
    return out;
}

std::string canonical_json(const nlohmann::json& value) {
    // nlohmann::json objects are std::map-backed, so keys come out sorted.
    return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

CacheKey make_cache_key(std::string provider_id, const nlohmann::json& request) {
    return CacheKey{std::move(provider_id), sha256(canonical_json(request))};
}

ContentCache::ContentCache(CacheSettings settings) : settings_(std::move(settings)) {
    if (settings_.enabled && settings_.directory) {
        std::error_code ec;
        std::filesystem::create_directories(*settings_.directory, ec);
        if (ec) throw Error(ErrorKind::IoFailure, "cannot create cache dir " + settings_.directory->string());
    }
}

std::filesystem::path ContentCache::file_for(const CacheKey& key) const {
    std::string dir;
    for (char c : key.provider_id) {
        const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
        dir += safe ? c : '_';
    }
    return *settings_.directory / dir / (key.hex() + ".json");
}

std::optional<nlohmann::json> ContentCache::get(const CacheKey& key) const {
    if (!settings_.enabled) return std::nullopt;
    const std::string map_key = key.provider_id + '\0' + key.hex();
    {
        std::shared_lock lock(mutex_);
        if (auto it = entries_.find(map_key); it != entries_.end()) return it->second;
    }
    if (!settings_.directory) return std::nullopt;
    std::ifstream in(file_for(key));
    if (!in) return std::nullopt;
    auto value = nlohmann::json::parse(in, nullptr, false);
    if (value.is_discarded()) return std::nullopt;
    std::unique_lock lock(mutex_);
    entries_.insert_or_assign(map_key, value);
    return value;
}

void ContentCache::put(const CacheKey& key, const nlohmann::json& value) {
    if (!settings_.enabled) return;
    {
        std::unique_lock lock(mutex_);
        entries_.insert_or_assign(key.provider_id + '\0' + key.hex(), value);
    }
    if (!settings_.directory) return;
    const auto path = file_for(key);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ostringstream suffix;
    suffix << ".tmp" << std::hash<std::thread::id>{}(std::this_thread::get_id());
    auto tmp = path;
    tmp += suffix.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoFailure, "cannot write cache file " + tmp.string());
        out << canonical_json(value);
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::IoFailure, "cannot move cache file into place: " + path.string());
}

std::size_t ContentCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

// ---------------------------------------------------------------------------

namespace {

std::string model_of(const ProviderDescriptor& d) { return d.model_name.value_or(""); }

}  // namespace

CachingEmbedder::CachingEmbedder(std::shared_ptr<const Embedder> inner, std::shared_ptr<ContentCache> cache)
    : Embedder(inner->descriptor()), inner_(std::move(inner)), cache_(std::move(cache)) {}

std::vector<EmbeddingVector> CachingEmbedder::embed_batch(std::span<const std::string> texts,
                                                          std::string_view language) const {
    std::vector<std::optional<EmbeddingVector>> slots(texts.size());
    std::vector<CacheKey> keys;
    std::vector<std::string> missing;
    std::vector<std::size_t> missing_at;
    keys.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        nlohmann::json request = {{"input", {texts[i]}}, {"language", language}, {"model", model_of(descriptor())}};
        keys.push_back(make_cache_key(id(), request));
        if (auto hit = cache_->get(keys.back())) {
            slots[i].emplace(hit->get<std::vector<double>>());
        } else {
            missing.push_back(texts[i]);
            missing_at.push_back(i);
        }
    }
    if (!missing.empty()) {
        auto fresh = inner_->embed(missing, language);
        for (std::size_t j = 0; j < fresh.size(); ++j) {
            const std::size_t i = missing_at[j];
            cache_->put(keys[i], nlohmann::json(std::vector<double>(fresh[j].values().begin(), fresh[j].values().end())));
            slots[i].emplace(std::move(fresh[j]));
        }
    }
    std::vector<EmbeddingVector> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

CachingTranslator::CachingTranslator(std::shared_ptr<const Translator> inner, std::shared_ptr<ContentCache> cache)
    : Translator(inner->descriptor()), inner_(std::move(inner)), cache_(std::move(cache)) {}

std::string CachingTranslator::translate_one(const std::string& text, std::string_view src, std::string_view tgt) const {
    nlohmann::json request = {{"model", model_of(descriptor())}, {"src", src}, {"text", text}, {"tgt", tgt}};
    return cached<std::string>(*cache_, make_cache_key(id(), request),
                               [&] { return inner_->translate(text, src, tgt); });
}

CachingAnswerScorer::CachingAnswerScorer(std::shared_ptr<const AnswerScorer> inner, std::shared_ptr<ContentCache> cache)
    : AnswerScorer(inner->descriptor()), inner_(std::move(inner)), cache_(std::move(cache)) {}

double CachingAnswerScorer::score_pair(const std::string& predicted, const std::string& reference,
                                       std::string_view pred_language) const {
    nlohmann::json request = {{"hypothesis", predicted}, {"language", pred_language}, {"source", reference}};
    return cached<double>(*cache_, make_cache_key(id(), request),
                          [&] { return inner_->score(predicted, reference, pred_language); });
}

CachingReferenceGenerator::CachingReferenceGenerator(std::shared_ptr<const ReferenceGenerator> inner,
                                                     std::shared_ptr<ContentCache> cache)
    : ReferenceGenerator(inner->descriptor()), inner_(std::move(inner)), cache_(std::move(cache)) {}

std::string CachingReferenceGenerator::generate_one(const std::string& prompt) const {
    nlohmann::json request = {{"prompt", prompt}};
    return cached<std::string>(*cache_, make_cache_key(id(), request), [&] { return inner_->generate_text(prompt); });
}

ProviderSet with_cache(const ProviderSet& providers, std::shared_ptr<ContentCache> cache) {
    if (!cache || !cache->enabled()) return providers;
    ProviderSet out;
    if (providers.embedder) out.embedder = std::make_shared<CachingEmbedder>(providers.embedder, cache);
    if (providers.translator) out.translator = std::make_shared<CachingTranslator>(providers.translator, cache);
    if (providers.answer_scorer) out.answer_scorer = std::make_shared<CachingAnswerScorer>(providers.answer_scorer, cache);
    if (providers.reference_generator) {
        out.reference_generator = std::make_shared<CachingReferenceGenerator>(providers.reference_generator, cache);
    }
    return out;
}

}  // namespace pivotrl
