// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pivotrl/backends.hpp"
#include "pivotrl/error.hpp"
#include "pivotrl/parsing.hpp"

namespace pivotrl {

enum class Metric { Comet, Embed, TransEmb, EmbedPlusTransEmb };

std::string_view to_string(Metric metric);

struct RewardConfig {
    Metric answer_metric = Metric::Comet;
    Metric reasoning_metric = Metric::EmbedPlusTransEmb;
    std::string pivot_language = std::string(kDefaultPivot);

    void validate() const;
    bool operator==(const RewardConfig&) const = default;
};

struct RewardPreset {
    std::string_view name;
    std::string_view answer_label;     // "on Answer Part"
    std::string_view reasoning_label;  // "on Reasoning Part"
    Metric answer_metric;
    Metric reasoning_metric;
};

// The reward ablation rows, the last of which is the full hybrid reward.
inline constexpr std::array<RewardPreset, 6> kRewardPresets{{
    {"comet_comet", "COMET", "COMET", Metric::Comet, Metric::Comet},
    {"comet_embed", "COMET", "Emb. Score", Metric::Comet, Metric::Embed},
    {"comet_trans_emb", "COMET", "Trans-Emb. Score", Metric::Comet, Metric::TransEmb},
    {"embed_embed", "Emb. Score", "Emb. Score", Metric::Embed, Metric::Embed},
    {"trans_emb_trans_emb", "Trans-Emb. Score", "Trans-Emb. Score", Metric::TransEmb, Metric::TransEmb},
    {"full", "COMET", "Emb. + Trans-Emb. Score", Metric::Comet, Metric::EmbedPlusTransEmb},
}};

inline constexpr std::string_view kFullPreset = "full";

const RewardPreset* find_preset(std::string_view name);
RewardConfig preset_config(std::string_view name, std::string_view pivot = kDefaultPivot);

struct RewardBreakdown {
    double r_answer = 0.0;
    double r_embed = 0.0;
    double r_trans_emb = 0.0;
    int r_fmt = 0;
    double r_reasoning = 0.0;
    double total = 0.0;

    bool operator==(const RewardBreakdown&) const = default;
};

// Provider steps taken while scoring, e.g. "answer:answer_scorer",
// "reasoning:translate", "reasoning:embed".
using RoutingTrace = std::vector<std::string>;

struct ItemError {
    ErrorKind kind;
    std::string message;
};

using ScoreOutcome = std::variant<RewardBreakdown, ItemError>;

struct ScorePair {
    ParsedResponse prediction;
    ParsedResponse reference;
};

// Composes (answer + reasoning) * format from the configured providers.
//
// Components keep their raw ranges: cosines stay signed, COMET-style scores
// lie in [0, 1]. A prediction that fails the format gate scores zero without
// touching any provider. Blank reasoning on either side makes that part's
// similarity 0, since there is nothing to embed.
class RewardEngine {
public:
    RewardEngine(ProviderSet providers, RewardConfig default_config = {});

    const RewardConfig& default_config() const noexcept { return default_config_; }
    const ProviderSet& providers() const noexcept { return providers_; }

    // Throws InvalidReference if `ref` is malformed or not in the pivot
    // language; provider errors propagate.
    RewardBreakdown score(const ParsedResponse& pred, const ParsedResponse& ref, const RewardConfig& config,
                          RoutingTrace* trace = nullptr) const;
    RewardBreakdown score(const ParsedResponse& pred, const ParsedResponse& ref) const {
        return score(pred, ref, default_config_);
    }

    // Element i equals score(pairs[i]) or carries that item's error.
    std::vector<ScoreOutcome> score_batch(std::span<const ScorePair> pairs, const RewardConfig& config) const;

private:
    double embed_similarity(const std::string& pred, std::string_view pred_language, const std::string& ref,
                            std::string_view pivot) const;
    double answer_part(const ParsedResponse& pred, const ParsedResponse& ref, const RewardConfig& config,
                       RoutingTrace* trace) const;
    void reasoning_part(const ParsedResponse& pred, const ParsedResponse& ref, const RewardConfig& config,
                        RewardBreakdown& out, RoutingTrace* trace) const;
    void require(Metric metric) const;

    ProviderSet providers_;
    RewardConfig default_config_;
};

}  // namespace pivotrl
