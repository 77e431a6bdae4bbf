// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pivotrl/parsing.hpp"
#include "pivotrl/similarity.hpp"
#include "pivotrl/synthlang.hpp"

namespace pivotrl {

enum class ProviderKind { Embedding, Translation, AnswerScorer, ReferenceGenerator };

std::string_view to_string(ProviderKind kind);
std::optional<ProviderKind> parse_provider_kind(std::string_view name);

struct ProviderDescriptor {
    ProviderKind kind = ProviderKind::Embedding;
    std::string id;
    std::optional<std::string> endpoint = std::nullopt;  // present iff remote
    std::optional<std::string> model_name = std::nullopt;
    int timeout_ms = 30000;
    int max_retries = 2;
    int batch_limit = 32;
    std::optional<std::string> bearer_token = std::nullopt;

    bool is_remote() const noexcept { return endpoint.has_value(); }
    void validate() const;
};

// Common base: a descriptor plus a counter of backend invocations. Providers
// are immutable after construction apart from that counter and are safe to
// share across threads.
class Provider {
public:
    explicit Provider(ProviderDescriptor descriptor);
    virtual ~Provider() = default;
    Provider(const Provider&) = delete;
    Provider& operator=(const Provider&) = delete;

    const ProviderDescriptor& descriptor() const noexcept { return descriptor_; }
    const std::string& id() const noexcept { return descriptor_.id; }
    std::uint64_t calls() const noexcept { return calls_.load(std::memory_order_relaxed); }

protected:
    void record_call() const noexcept { calls_.fetch_add(1, std::memory_order_relaxed); }

private:
    ProviderDescriptor descriptor_;
    mutable std::atomic<std::uint64_t> calls_{0};
};

class Embedder : public Provider {
public:
    using Provider::Provider;

    // One vector per text, all of the same dim. Requests are split into
    // chunks of at most batch_limit texts; each chunk is one call. Throws
    // DimensionDrift if the backend changes dim between or within calls.
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts, std::string_view language) const;

protected:
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                                     std::string_view language) const = 0;

private:
    mutable std::atomic<std::size_t> dim_{0};
};

class Translator : public Provider {
public:
    using Provider::Provider;

    std::string translate(const std::string& text, std::string_view src, std::string_view tgt) const;

protected:
    virtual std::string translate_one(const std::string& text, std::string_view src,
                                      std::string_view tgt) const = 0;
};

class AnswerScorer : public Provider {
public:
    using Provider::Provider;

    // Score in [0, 1]. Out-of-range backend values are clamped with a warning;
    // non-finite values are a provider fault.
    double score(const std::string& predicted, const std::string& reference, std::string_view pred_language) const;

protected:
    virtual double score_pair(const std::string& predicted, const std::string& reference,
                              std::string_view pred_language) const = 0;
};

class ReferenceGenerator : public Provider {
public:
    using Provider::Provider;

    std::string generate_text(const std::string& prompt) const;
    // Parses the expert output; malformed output throws RecordRejected.
    ParsedResponse generate_reference(const std::string& prompt, std::string_view pivot = kDefaultPivot) const;

protected:
    virtual std::string generate_one(const std::string& prompt) const = 0;
};

struct ProviderSet {
    std::shared_ptr<const Embedder> embedder;
    std::shared_ptr<const Translator> translator;
    std::shared_ptr<const AnswerScorer> answer_scorer;
    std::shared_ptr<const ReferenceGenerator> reference_generator;
};

// ---------------------------------------------------------------------------
// Deterministic in-process backends.

inline constexpr std::size_t kDefaultBowDims = 512;

// Whitespace tokens hashed (FNV-1a) into `dims` buckets, counted, then
// L2-normalized. Blank text has no tokens and yields ZeroNormVector.
class BagOfWordsEmbedder final : public Embedder {
public:
    explicit BagOfWordsEmbedder(std::size_t dims = kDefaultBowDims, std::string id = "bow");
    static std::size_t bucket(std::string_view token, std::size_t dims) noexcept;
    std::size_t dims() const noexcept { return dims_; }

protected:
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                             std::string_view language) const override;

private:
    std::size_t dims_;
};

// Bag-of-words over pivot concepts: tokens of a known synthetic language are
// mapped back to their pivot token before hashing, so a text and its exact
// translation embed identically. This models the defining property of a
// multilingual embedding model, which plain BagOfWordsEmbedder lacks (it sees
// disjoint token sets across languages).
class AlignedBagOfWordsEmbedder final : public Embedder {
public:
    AlignedBagOfWordsEmbedder(std::vector<SyntheticLanguage> languages,
                              std::string pivot = std::string(kDefaultPivot), std::size_t dims = kDefaultBowDims,
                              std::string id = "aligned_bow");

protected:
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                             std::string_view language) const override;

private:
    std::vector<SyntheticLanguage> languages_;
    std::string pivot_;
    std::size_t dims_;
};

// Exact token relabeling between the pivot and a set of synthetic languages.
class DictionaryTranslator final : public Translator {
public:
    explicit DictionaryTranslator(std::vector<SyntheticLanguage> languages,
                                  std::string pivot = std::string(kDefaultPivot), std::string id = "dictionary");

    bool knows(std::string_view code) const;

protected:
    std::string translate_one(const std::string& text, std::string_view src, std::string_view tgt) const override;

private:
    const SyntheticLanguage* find(std::string_view code) const;

    std::vector<SyntheticLanguage> languages_;
    std::string pivot_;
};

// Multiset token F1 between the pivot-mapped prediction and the reference.
class TokenF1AnswerScorer final : public AnswerScorer {
public:
    explicit TokenF1AnswerScorer(std::shared_ptr<const Translator> to_pivot = nullptr,
                                 std::string pivot = std::string(kDefaultPivot), std::string id = "token_f1");

    static double token_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& reference);

protected:
    double score_pair(const std::string& predicted, const std::string& reference,
                      std::string_view pred_language) const override;

private:
    std::shared_ptr<const Translator> to_pivot_;
    std::string pivot_;
};

// Solves synthetic addition prompts (in any of the known languages) and
// answers with the canonical partial-sum response in the pivot language.
// Prompts it cannot read get an untagged refusal, which the parse gate rejects.
class OracleReferenceGenerator final : public ReferenceGenerator {
public:
    explicit OracleReferenceGenerator(std::vector<SyntheticLanguage> languages, std::string id = "oracle");

protected:
    std::string generate_one(const std::string& prompt) const override;

private:
    std::vector<SyntheticLanguage> languages_;
};

}  // namespace pivotrl
