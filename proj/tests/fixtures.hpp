// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "pivotrl/backends.hpp"
#include "pivotrl/synthlang.hpp"

namespace pivotrl::testing {

// Languages l1..l4 over the d=1, t=2 vocabulary, plus deterministic providers.
struct World {
    std::vector<std::string> vocab = pivot_vocabulary({1, 2});
    std::vector<SyntheticLanguage> languages = make_languages(7, 4, vocab);
    std::shared_ptr<const DictionaryTranslator> translator = std::make_shared<DictionaryTranslator>(languages);
    std::shared_ptr<const BagOfWordsEmbedder> embedder = std::make_shared<BagOfWordsEmbedder>();
    std::shared_ptr<const TokenF1AnswerScorer> scorer = std::make_shared<TokenF1AnswerScorer>(translator);
    std::shared_ptr<const OracleReferenceGenerator> generator = std::make_shared<OracleReferenceGenerator>(languages);

    ProviderSet providers() const { return {embedder, translator, scorer, generator}; }
    const SyntheticLanguage& lang(int i) const { return languages.at(static_cast<std::size_t>(i)); }
};

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("pivotrl-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// An embedder whose dims follow a script, for drift tests.
class ScriptedEmbedder final : public Embedder {
public:
    ScriptedEmbedder(std::vector<std::size_t> dims_per_call, int batch_limit = 32)
        : Embedder(ProviderDescriptor{.kind = ProviderKind::Embedding, .id = "scripted", .batch_limit = batch_limit}),
          dims_(std::move(dims_per_call)) {}

protected:
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts, std::string_view) const override {
        const auto d = dims_.at(std::min(next_++, dims_.size() - 1));
        std::vector<EmbeddingVector> out;
        for (std::size_t i = 0; i < texts.size(); ++i) out.emplace_back(std::vector<double>(d, 1.0));
        return out;
    }

private:
    std::vector<std::size_t> dims_;
    mutable std::size_t next_ = 0;
};

class FixedScorer final : public AnswerScorer {
public:
    explicit FixedScorer(double value)
        : AnswerScorer(ProviderDescriptor{.kind = ProviderKind::AnswerScorer, .id = "fixed"}), value_(value) {}

protected:
    double score_pair(const std::string&, const std::string&, std::string_view) const override { return value_; }

private:
    double value_;
};

class FixedGenerator final : public ReferenceGenerator {
public:
    explicit FixedGenerator(std::string text)
        : ReferenceGenerator(ProviderDescriptor{.kind = ProviderKind::ReferenceGenerator, .id = "fixed"}),
          text_(std::move(text)) {}

protected:
    std::string generate_one(const std::string&) const override { return text_; }

private:
    std::string text_;
};

}  // namespace pivotrl::testing
