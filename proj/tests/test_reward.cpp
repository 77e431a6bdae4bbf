// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "pivotrl/error.hpp"
#include "pivotrl/reward.hpp"
#include "pivotrl/text.hpp"

using namespace pivotrl;
using namespace pivotrl::testing;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Cosine of two bag-of-words vectors computed straight from token counts.
double brute_force_bow_cosine(const std::string& a, const std::string& b, std::size_t dims) {
    std::map<std::size_t, double> x;
    std::map<std::size_t, double> y;
    for (const auto& t : text::split_whitespace(a)) x[fnv1a(t) % dims] += 1;
    for (const auto& t : text::split_whitespace(b)) y[fnv1a(t) % dims] += 1;
    double dot = 0;
    double nx = 0;
    double ny = 0;
    for (auto [k, v] : x) {
        nx += v * v;
        if (y.count(k)) dot += v * y[k];
    }
    for (auto [k, v] : y) ny += v * v;
    return dot / (std::sqrt(nx) * std::sqrt(ny));
}

std::uint64_t total_calls(const World& w) {
    return w.embedder->calls() + w.translator->calls() + w.scorer->calls() + w.generator->calls();
}

ParsedResponse target(const SyntheticTaskInstance& task) {
    return parse_response(RawResponse{render_target_response(task), task.target_language});
}

}  // namespace

TEST_SUITE("reward") {
    TEST_CASE("preset table has the six ablation rows with unique names") {
        std::set<std::string_view> names;
        for (const auto& p : kRewardPresets) names.insert(p.name);
        CHECK(names.size() == 6);
        CHECK(find_preset("full") != nullptr);
        CHECK(find_preset("nope") == nullptr);
        const auto full = preset_config("full");
        CHECK(full.answer_metric == Metric::Comet);
        CHECK(full.reasoning_metric == Metric::EmbedPlusTransEmb);
        CHECK(full == RewardConfig{});
        CHECK_THROWS_AS(preset_config("nope"), Error);
        RewardConfig bad;
        bad.answer_metric = Metric::EmbedPlusTransEmb;
        CHECK_THROWS_AS(bad.validate(), Error);
    }

    TEST_CASE("malformed prediction scores zero with no provider calls, in every mode") {
        World w;
        const RewardEngine engine(w.providers());
        const auto ref = make_reference("2 + 3 = 5", "5", "en");
        for (const auto& preset : kRewardPresets) {
            RoutingTrace trace;
            const auto b = engine.score(parse_response({"<think>2 + 3 = 5</think>", "en"}), ref,
                                        preset_config(preset.name), &trace);
            CHECK(b == RewardBreakdown{});
            CHECK(trace == RoutingTrace{"format:gated"});
        }
        CHECK(total_calls(w) == 0);
    }

    TEST_CASE("identical pivot prediction scores 1 + 1 + 1 = 3") {
        World w;
        const RewardEngine engine(w.providers());
        const auto ref = make_reference("2 + 3 = 5", "5", "en");
        const auto pred = parse_response({"<think>2 + 3 = 5</think><answer>5</answer>", "en"});
        const auto b = engine.score(pred, ref);
        CHECK(b.r_answer == 1.0);
        CHECK(b.r_embed == 1.0);
        CHECK(b.r_trans_emb == 1.0);
        CHECK(b.r_fmt == 1);
        CHECK(b.total == 3.0);
        // A pivot prediction needs no translation.
        CHECK(w.translator->calls() == 0);
    }

    TEST_CASE("exact translation into l1: trans-emb and answer are 1, embed is the cross-lingual bag cosine") {
        World w;
        const RewardEngine engine(w.providers());
        const auto task = make_task_from_operands({7, 8}, w.lang(0));
        const auto pred = target(task);
        const auto b = engine.score(pred, task.pivot_reference);
        CHECK(b.r_answer == 1.0);
        CHECK(b.r_trans_emb == 1.0);
        const double expected = brute_force_bow_cosine(pred.reasoning, task.pivot_reference.reasoning, kDefaultBowDims);
        CHECK(b.r_embed == doctest::Approx(expected).epsilon(1e-14));
        CHECK(b.r_embed < 1.0);
        CHECK(b.total == doctest::Approx(2.0 + expected).epsilon(1e-14));
    }

    TEST_CASE("comet on both parts routes reasoning through the answer scorer") {
        World w;
        const RewardEngine engine(w.providers());
        const auto task = make_task_from_operands({2, 3}, w.lang(1));
        RoutingTrace trace;
        const auto b = engine.score(target(task), task.pivot_reference, preset_config("comet_comet"), &trace);
        CHECK(trace == RoutingTrace{"answer:answer_scorer", "reasoning:answer_scorer"});
        CHECK(b.r_embed == 0.0);
        CHECK(b.r_trans_emb == 0.0);
        CHECK(b.r_reasoning == 1.0);  // token F1 after mapping back
        CHECK(b.total == 2.0);
        CHECK(w.embedder->calls() == 0);
    }

    TEST_CASE("every preset takes a distinct route") {
        World w;
        const RewardEngine engine(w.providers());
        const auto task = make_task_from_operands({4, 4}, w.lang(2));
        std::set<RoutingTrace> traces;
        for (const auto& p : kRewardPresets) {
            RoutingTrace trace;
            engine.score(target(task), task.pivot_reference, preset_config(p.name), &trace);
            traces.insert(trace);
        }
        CHECK(traces.size() == 6);
    }

    TEST_CASE("pivot predictions embed once and reuse the cosine for both terms") {
        World w;
        const RewardEngine engine(w.providers());
        RoutingTrace trace;
        const auto ref = make_reference("1 + 1 = 2", "2", "en");
        const auto b = engine.score(parse_response({"<think>1 + 2 = 2</think><answer>2</answer>", "en"}), ref,
                                    RewardConfig{}, &trace);
        CHECK(b.r_embed == b.r_trans_emb);
        CHECK(std::count(trace.begin(), trace.end(), "reasoning:translate") == 0);
    }

    TEST_CASE("answer-part trans-emb translates the predicted answer") {
        World w;
        const RewardEngine engine(w.providers());
        const auto task = make_task_from_operands({3, 3}, w.lang(3));
        const auto b = engine.score(target(task), task.pivot_reference, preset_config("trans_emb_trans_emb"));
        CHECK(b.r_answer == 1.0);
        CHECK(b.r_trans_emb == 1.0);
        CHECK(b.r_embed == 0.0);
        CHECK(b.total == 2.0);
    }

    TEST_CASE("invalid references are rejected") {
        World w;
        const RewardEngine engine(w.providers());
        const auto pred = parse_response({"<think>a</think><answer>b</answer>", "en"});
        for (const auto& ref : {make_reference("r", "", "en"), make_reference("r", "a", "es"), ParsedResponse{}}) {
            try {
                engine.score(pred, ref);
                FAIL("expected InvalidReference");
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::InvalidReference);
            }
        }
    }

    TEST_CASE("blank reasoning contributes zero without embedding") {
        World w;
        const RewardEngine engine(w.providers());
        RoutingTrace trace;
        const auto b = engine.score(parse_response({"<think> </think><answer>5</answer>", "en"}),
                                    make_reference("2 + 3 = 5", "5", "en"), RewardConfig{}, &trace);
        CHECK(b.r_reasoning == 0.0);
        CHECK(b.total == 1.0);
        CHECK(w.embedder->calls() == 0);
    }

    TEST_CASE("provider errors propagate from score and stay in their slot in score_batch") {
        World w;
        auto providers = w.providers();
        providers.answer_scorer = std::make_shared<FixedScorer>(std::nan(""));
        const RewardEngine engine(providers);
        const auto ref = make_reference("1 + 1 = 2", "2", "en");
        const auto good = parse_response({"<think>1 + 1 = 2</think><answer>2</answer>", "en"});
        CHECK_THROWS_AS(engine.score(good, ref), Error);
        const std::vector<ScorePair> pairs{{good, ref}, {parse_response({"junk", "en"}), ref}};
        const auto out = engine.score_batch(pairs, RewardConfig{});
        REQUIRE(std::holds_alternative<ItemError>(out[0]));
        CHECK(std::get<ItemError>(out[0]).kind == ErrorKind::ProviderUnavailable);
        CHECK(std::get<RewardBreakdown>(out[1]).total == 0.0);
    }

    TEST_CASE("random corpus: decomposition, ranges, batch equality and order independence") {
        World w;
        const RewardEngine engine(w.providers());
        std::mt19937_64 rng(5);
        std::vector<ScorePair> pairs;
        for (int n = 0; n < 300; ++n) {
            const long long a = static_cast<long long>(rng() % 10);
            const long long b = static_cast<long long>(rng() % 10);
            const int li = static_cast<int>(rng() % 5);
            const auto lang = li == 4 ? SyntheticLanguage::pivot(w.vocab) : w.lang(li);
            const auto task = make_task_from_operands({a, b}, lang);
            auto tokens = text::split_whitespace(task.pivot_reference.reasoning);
            // Random corruption: drop, replace or shuffle tokens.
            for (auto& t : tokens) {
                if (rng() % 4 == 0) t = w.vocab[rng() % w.vocab.size()];
            }
            const std::string answer = rng() % 3 == 0 ? std::to_string(rng() % 19) : task.canonical_answer;
            std::string text = render_response(lang.to_language_text(text::join(tokens)), lang.to_language(answer));
            if (rng() % 7 == 0) text = text.substr(0, text.size() / 2);
            pairs.push_back({parse_response({text, lang.code()}), task.pivot_reference});
        }
        for (const auto& preset : kRewardPresets) {
            const auto config = preset_config(preset.name);
            const auto batch = engine.score_batch(pairs, config);
            REQUIRE(batch.size() == pairs.size());
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const auto single = engine.score(pairs[i].prediction, pairs[i].reference, config);
                const auto& b = std::get<RewardBreakdown>(batch[i]);
                CHECK(b == single);
                CHECK(std::abs(b.total - b.r_fmt * (b.r_answer + b.r_reasoning)) <= 1e-12);
                if (b.r_fmt == 0) CHECK(b.total == 0.0);
                CHECK(b.r_answer >= -1.0);
                CHECK(b.r_answer <= 1.0);
                if (preset.name == "full") {
                    CHECK(b.total >= -2.0);
                    CHECK(b.total <= 3.0);
                    CHECK(b.r_reasoning == b.r_embed + b.r_trans_emb);
                } else {
                    CHECK(b.total >= 0.0);
                    CHECK(b.total <= 2.0 + 1e-12);
                }
            }
            // Reversing the batch reverses the results.
            std::vector<ScorePair> reversed(pairs.rbegin(), pairs.rend());
            const auto back = engine.score_batch(reversed, config);
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                CHECK(std::get<RewardBreakdown>(back[pairs.size() - 1 - i]) == std::get<RewardBreakdown>(batch[i]));
            }
        }
    }

    TEST_CASE("singleton batch equals single score") {
        World w;
        const RewardEngine engine(w.providers());
        const auto task = make_task_from_operands({1, 9}, w.lang(0));
        const std::vector<ScorePair> one{{target(task), task.pivot_reference}};
        CHECK(std::get<RewardBreakdown>(engine.score_batch(one, RewardConfig{})[0]) ==
              engine.score(one[0].prediction, one[0].reference));
    }
}
