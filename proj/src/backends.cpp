// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/backends.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "pivotrl/error.hpp"
#include "pivotrl/random.hpp"
#include "pivotrl/text.hpp"

namespace pivotrl {

std::string_view to_string(ProviderKind kind) {
    switch (kind) {
        case ProviderKind::Embedding: return "embedding";
        case ProviderKind::Translation: return "translation";
        case ProviderKind::AnswerScorer: return "answer_scorer";
        case ProviderKind::ReferenceGenerator: return "reference_generator";
    }
    return "unknown";
}

std::optional<ProviderKind> parse_provider_kind(std::string_view name) {
    for (auto k : {ProviderKind::Embedding, ProviderKind::Translation, ProviderKind::AnswerScorer,
                   ProviderKind::ReferenceGenerator}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

void ProviderDescriptor::validate() const {
    if (id.empty()) throw Error(ErrorKind::InvalidArgument, "provider id must be non-empty");
    if (timeout_ms <= 0) throw Error(ErrorKind::InvalidArgument, id + ": timeout_ms must be positive");
    if (max_retries < 0) throw Error(ErrorKind::InvalidArgument, id + ": max_retries must be >= 0");
    if (batch_limit < 1) throw Error(ErrorKind::InvalidArgument, id + ": batch_limit must be >= 1");
    if (endpoint && endpoint->empty()) throw Error(ErrorKind::InvalidArgument, id + ": empty endpoint");
}

Provider::Provider(ProviderDescriptor descriptor) : descriptor_(std::move(descriptor)) { descriptor_.validate(); }

std::vector<EmbeddingVector> Embedder::embed(const std::vector<std::string>& texts, std::string_view language) const {
    if (texts.empty()) throw Error(ErrorKind::InvalidArgument, "embed needs at least one text");
    for (const auto& t : texts) {
        if (text::is_blank(t)) throw Error(ErrorKind::InvalidArgument, "embed got a blank text");
    }
    const auto limit = static_cast<std::size_t>(descriptor().batch_limit);
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t begin = 0; begin < texts.size(); begin += limit) {
        const std::size_t n = std::min(limit, texts.size() - begin);
        record_call();
        auto chunk = embed_batch(std::span<const std::string>(texts).subspan(begin, n), language);
        if (chunk.size() != n) {
            throw Error(ErrorKind::DimensionDrift, id() + " returned " + std::to_string(chunk.size()) +
                                                       " vectors for " + std::to_string(n) + " texts");
        }
        for (auto& v : chunk) {
            std::size_t expected = 0;
            if (!dim_.compare_exchange_strong(expected, v.dim()) && expected != v.dim()) {
                throw Error(ErrorKind::DimensionDrift, id() + " returned dim " + std::to_string(v.dim()) +
                                                           ", expected " + std::to_string(expected));
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::string Translator::translate(const std::string& text, std::string_view src, std::string_view tgt) const {
    if (text::is_blank(text)) throw Error(ErrorKind::InvalidArgument, "translate got a blank text");
    if (src == tgt) throw Error(ErrorKind::InvalidArgument, "translate needs src != tgt");
    record_call();
    return translate_one(text, src, tgt);
}

double AnswerScorer::score(const std::string& predicted, const std::string& reference,
                           std::string_view pred_language) const {
    if (text::is_blank(predicted) || text::is_blank(reference)) {
        throw Error(ErrorKind::InvalidArgument, "score_answer needs non-blank strings");
    }
    record_call();
    const double raw = score_pair(predicted, reference, pred_language);
    if (!std::isfinite(raw)) throw Error(ErrorKind::ProviderUnavailable, id() + " returned a non-finite score");
    if (raw < 0.0 || raw > 1.0) {
        spdlog::warn("answer scorer {} returned {} outside [0, 1]; clamping", id(), raw);
        return std::clamp(raw, 0.0, 1.0);
    }
    return raw;
}

std::string ReferenceGenerator::generate_text(const std::string& prompt) const {
    if (text::is_blank(prompt)) throw Error(ErrorKind::InvalidArgument, "generate_reference needs a prompt");
    record_call();
    return generate_one(prompt);
}

ParsedResponse ReferenceGenerator::generate_reference(const std::string& prompt, std::string_view pivot) const {
    auto parsed = parse_response(RawResponse{generate_text(prompt), std::string(pivot)});
    if (!parsed.well_formed) throw Error(ErrorKind::RecordRejected, id() + " produced a malformed reference");
    return parsed;
}

// ---------------------------------------------------------------------------

BagOfWordsEmbedder::BagOfWordsEmbedder(std::size_t dims, std::string id)
    : Embedder(ProviderDescriptor{.kind = ProviderKind::Embedding, .id = std::move(id), .batch_limit = 1024}),
      dims_(dims) {
    if (dims_ == 0) throw Error(ErrorKind::InvalidArgument, "bag-of-words dims must be >= 1");
}

std::size_t BagOfWordsEmbedder::bucket(std::string_view token, std::size_t dims) noexcept {
    return static_cast<std::size_t>(stable_hash(token) % dims);
}

namespace {

EmbeddingVector bag_of_words(const std::vector<std::string>& tokens, std::size_t dims) {
    std::vector<double> counts(dims, 0.0);
    for (const auto& tok : tokens) counts[BagOfWordsEmbedder::bucket(tok, dims)] += 1.0;
    double norm = 0.0;
    for (double c : counts) norm += c * c;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& c : counts) c /= norm;
    }
    return EmbeddingVector(std::move(counts));
}

}  // namespace

std::vector<EmbeddingVector> BagOfWordsEmbedder::embed_batch(std::span<const std::string> texts,
                                                             std::string_view /*language*/) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(bag_of_words(text::split_whitespace(t), dims_));
    return out;
}

AlignedBagOfWordsEmbedder::AlignedBagOfWordsEmbedder(std::vector<SyntheticLanguage> languages, std::string pivot,
                                                     std::size_t dims, std::string id)
    : Embedder(ProviderDescriptor{.kind = ProviderKind::Embedding, .id = std::move(id), .batch_limit = 1024}),
      languages_(std::move(languages)),
      pivot_(std::move(pivot)),
      dims_(dims) {
    if (dims_ == 0) throw Error(ErrorKind::InvalidArgument, "bag-of-words dims must be >= 1");
}

std::vector<EmbeddingVector> AlignedBagOfWordsEmbedder::embed_batch(std::span<const std::string> texts,
                                                                    std::string_view language) const {
    const SyntheticLanguage* lang = nullptr;
    if (language != pivot_) {
        for (const auto& l : languages_) {
            if (l.code() == language) lang = &l;
        }
        if (lang == nullptr) throw Error(ErrorKind::UnknownLanguage, "no lexicon for '" + std::string(language) + "'");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto tokens = text::split_whitespace(t);
        if (lang != nullptr) {
            for (auto& tok : tokens) tok = lang->to_pivot(tok);
        }
        out.push_back(bag_of_words(tokens, dims_));
    }
    return out;
}

DictionaryTranslator::DictionaryTranslator(std::vector<SyntheticLanguage> languages, std::string pivot, std::string id)
    : Translator(ProviderDescriptor{.kind = ProviderKind::Translation, .id = std::move(id)}),
      languages_(std::move(languages)),
      pivot_(std::move(pivot)) {}

const SyntheticLanguage* DictionaryTranslator::find(std::string_view code) const {
    for (const auto& l : languages_) {
        if (l.code() == code) return &l;
    }
    return nullptr;
}

bool DictionaryTranslator::knows(std::string_view code) const { return code == pivot_ || find(code) != nullptr; }

std::string DictionaryTranslator::translate_one(const std::string& text, std::string_view src,
                                                std::string_view tgt) const {
    for (auto code : {src, tgt}) {
        if (!knows(code)) throw Error(ErrorKind::UnknownLanguage, "dictionary has no language '" + std::string(code) + "'");
    }
    std::string pivot_text = src == pivot_ ? text::join(text::split_whitespace(text)) : find(src)->to_pivot_text(text);
    if (tgt == pivot_) return pivot_text;
    return find(tgt)->to_language_text(pivot_text);
}

TokenF1AnswerScorer::TokenF1AnswerScorer(std::shared_ptr<const Translator> to_pivot, std::string pivot, std::string id)
    : AnswerScorer(ProviderDescriptor{.kind = ProviderKind::AnswerScorer, .id = std::move(id)}),
      to_pivot_(std::move(to_pivot)),
      pivot_(std::move(pivot)) {}

double TokenF1AnswerScorer::token_f1(const std::vector<std::string>& predicted,
                                     const std::vector<std::string>& reference) {
    if (predicted.empty() || reference.empty()) return 0.0;
    std::map<std::string_view, long> counts;
    for (const auto& t : reference) ++counts[t];
    long common = 0;
    for (const auto& t : predicted) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    const double precision = static_cast<double>(common) / static_cast<double>(predicted.size());
    const double recall = static_cast<double>(common) / static_cast<double>(reference.size());
    return 2.0 * precision * recall / (precision + recall);
}

double TokenF1AnswerScorer::score_pair(const std::string& predicted, const std::string& reference,
                                       std::string_view pred_language) const {
    std::string mapped = predicted;
    if (to_pivot_ && pred_language != pivot_) mapped = to_pivot_->translate(predicted, pred_language, pivot_);
    return token_f1(text::split_whitespace(mapped), text::split_whitespace(reference));
}

OracleReferenceGenerator::OracleReferenceGenerator(std::vector<SyntheticLanguage> languages, std::string id)
    : ReferenceGenerator(ProviderDescriptor{.kind = ProviderKind::ReferenceGenerator, .id = std::move(id)}),
      languages_(std::move(languages)) {}

std::string OracleReferenceGenerator::generate_one(const std::string& prompt) const {
    const std::string refusal = "I cannot solve this prompt.";
    std::vector<std::string> tokens = text::split_whitespace(prompt);
    for (auto& tok : tokens) {
        for (const auto& lang : languages_) {
            auto mapped = lang.to_pivot(tok);
            if (mapped != tok) {
                tok = std::move(mapped);
                break;
            }
        }
    }
    // Expect: n (+ n)* =
    if (tokens.size() < 4 || tokens.size() % 2 != 0 || tokens.back() != "=") return refusal;
    std::vector<long long> operands;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (i % 2 == 1) {
            if (tokens[i] != "+") return refusal;
            continue;
        }
        const auto& t = tokens[i];
        if (t.empty() || t.size() > 15 || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            return refusal;
        }
        operands.push_back(std::stoll(t));
    }
    long long sum = 0;
    for (auto x : operands) sum += x;
    return render_response(pivot_reasoning(operands), std::to_string(sum));
}

}  // namespace pivotrl
