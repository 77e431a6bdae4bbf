// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/reward.hpp"

#include "pivotrl/similarity.hpp"
#include "pivotrl/text.hpp"

namespace pivotrl {

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::Comet: return "comet";
        case Metric::Embed: return "embed";
        case Metric::TransEmb: return "trans_emb";
        case Metric::EmbedPlusTransEmb: return "embed_plus_trans_emb";
    }
    return "unknown";
}

void RewardConfig::validate() const {
    if (answer_metric == Metric::EmbedPlusTransEmb) {
        throw Error(ErrorKind::InvalidArgument, "embed_plus_trans_emb is a reasoning-only metric");
    }
    if (pivot_language.empty()) throw Error(ErrorKind::InvalidArgument, "pivot language must be non-empty");
}

const RewardPreset* find_preset(std::string_view name) {
    for (const auto& p : kRewardPresets) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

RewardConfig preset_config(std::string_view name, std::string_view pivot) {
    const auto* p = find_preset(name);
    if (!p) throw Error(ErrorKind::InvalidArgument, "unknown reward mode '" + std::string(name) + "'");
    return RewardConfig{p->answer_metric, p->reasoning_metric, std::string(pivot)};
}

RewardEngine::RewardEngine(ProviderSet providers, RewardConfig default_config)
    : providers_(std::move(providers)), default_config_(std::move(default_config)) {
    default_config_.validate();
}

void RewardEngine::require(Metric metric) const {
    const bool ok = metric == Metric::Comet ? static_cast<bool>(providers_.answer_scorer)
                    : metric == Metric::Embed
                        ? static_cast<bool>(providers_.embedder)
                        : static_cast<bool>(providers_.embedder) && static_cast<bool>(providers_.translator);
    if (!ok) {
        throw Error(ErrorKind::InvalidArgument,
                    "metric " + std::string(to_string(metric)) + " has no configured provider");
    }
}

double RewardEngine::embed_similarity(const std::string& pred, std::string_view pred_language, const std::string& ref,
                                      std::string_view pivot) const {
    if (pred_language == pivot) {
        auto v = providers_.embedder->embed({pred, ref}, pivot);
        return cosine_similarity(v[0], v[1]);
    }
    auto p = providers_.embedder->embed({pred}, pred_language);
    auto r = providers_.embedder->embed({ref}, pivot);
    return cosine_similarity(p[0], r[0]);
}

namespace {

void note(RoutingTrace* trace, std::string step) {
    if (trace) trace->push_back(std::move(step));
}

}  // namespace

double RewardEngine::answer_part(const ParsedResponse& pred, const ParsedResponse& ref, const RewardConfig& config,
                                 RoutingTrace* trace) const {
    const auto& pivot = config.pivot_language;
    switch (config.answer_metric) {
        case Metric::Comet:
            note(trace, "answer:answer_scorer");
            return providers_.answer_scorer->score(pred.answer, ref.answer, pred.language);
        case Metric::Embed:
            note(trace, "answer:embed");
            return embed_similarity(pred.answer, pred.language, ref.answer, pivot);
        case Metric::TransEmb: {
            std::string translated = pred.answer;
            if (pred.language != pivot) {
                note(trace, "answer:translate");
                translated = providers_.translator->translate(pred.answer, pred.language, pivot);
            }
            note(trace, "answer:embed");
            return embed_similarity(translated, pivot, ref.answer, pivot);
        }
        case Metric::EmbedPlusTransEmb: break;
    }
    throw Error(ErrorKind::InvalidArgument, "invalid answer metric");
}

void RewardEngine::reasoning_part(const ParsedResponse& pred, const ParsedResponse& ref, const RewardConfig& config,
                                  RewardBreakdown& out, RoutingTrace* trace) const {
    const auto& pivot = config.pivot_language;
    const Metric metric = config.reasoning_metric;
    if (text::is_blank(pred.reasoning) || text::is_blank(ref.reasoning)) {
        note(trace, "reasoning:blank");
        return;
    }
    if (metric == Metric::Comet) {
        note(trace, "reasoning:answer_scorer");
        out.r_reasoning = providers_.answer_scorer->score(pred.reasoning, ref.reasoning, pred.language);
        return;
    }

    const bool want_embed = metric == Metric::Embed || metric == Metric::EmbedPlusTransEmb;
    const bool want_trans = metric == Metric::TransEmb || metric == Metric::EmbedPlusTransEmb;
    if (pred.language == pivot) {
        // Nothing to translate: both similarities are the in-pivot cosine.
        note(trace, "reasoning:embed");
        const double c = embed_similarity(pred.reasoning, pivot, ref.reasoning, pivot);
        if (want_embed) out.r_embed = c;
        if (want_trans) out.r_trans_emb = c;
    } else {
        if (want_embed) {
            note(trace, "reasoning:embed");
            out.r_embed = embed_similarity(pred.reasoning, pred.language, ref.reasoning, pivot);
        }
        if (want_trans) {
            note(trace, "reasoning:translate");
            const auto translated = providers_.translator->translate(pred.reasoning, pred.language, pivot);
            note(trace, "reasoning:embed_translated");
            out.r_trans_emb = embed_similarity(translated, pivot, ref.reasoning, pivot);
        }
    }
    out.r_reasoning = out.r_embed + out.r_trans_emb;
}

RewardBreakdown RewardEngine::score(const ParsedResponse& pred, const ParsedResponse& ref, const RewardConfig& config,
                                    RoutingTrace* trace) const {
    config.validate();
    if (!ref.well_formed || text::is_blank(ref.answer)) {
        throw Error(ErrorKind::InvalidReference, "reference must be well-formed with a non-empty answer");
    }
    if (ref.language != config.pivot_language) {
        throw Error(ErrorKind::InvalidReference,
                    "reference language '" + ref.language + "' is not the pivot '" + config.pivot_language + "'");
    }

    RewardBreakdown out;
    out.r_fmt = format_reward(pred);
    if (out.r_fmt == 0) {
        note(trace, "format:gated");
        return out;
    }
    require(config.answer_metric);
    require(config.reasoning_metric);

    out.r_answer = answer_part(pred, ref, config, trace);
    reasoning_part(pred, ref, config, out, trace);
    out.total = (out.r_answer + out.r_reasoning) * static_cast<double>(out.r_fmt);
    return out;
}

std::vector<ScoreOutcome> RewardEngine::score_batch(std::span<const ScorePair> pairs, const RewardConfig& config) const {
    std::vector<ScoreOutcome> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        try {
            out.emplace_back(score(pair.prediction, pair.reference, config));
        } catch (const Error& e) {
            out.emplace_back(ItemError{e.kind(), e.detail()});
        } catch (const std::exception& e) {
            out.emplace_back(ItemError{ErrorKind::ProviderUnavailable, e.what()});
        }
    }
    return out;
}

}  // namespace pivotrl
