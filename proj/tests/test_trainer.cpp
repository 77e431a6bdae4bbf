// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "pivotrl/error.hpp"
#include "pivotrl/trainer.hpp"

using namespace pivotrl;
using namespace pivotrl::testing;

namespace {

ToyTaskConfig small_task(int languages = 2) {
    ToyTaskConfig t;
    t.languages = languages;
    t.prompts_per_language = 2;
    return t;
}

double least_squares_slope(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_SUITE("trainer") {
    TEST_CASE("environment layout") {
        const ToyEnvironment env(small_task(3));
        REQUIRE(env.languages().size() == 4);
        CHECK(env.languages()[0].code() == "en");
        CHECK(env.languages()[0].is_identity());
        CHECK(env.languages()[3].code() == "l3");
        CHECK(env.vocab_size() == 26);
        CHECK(env.length() == 10);
        CHECK(env.prompts(1).size() == 2);
        CHECK(env.is_tag(22));
        CHECK_FALSE(env.is_tag(21));

        // The canonical token sequence renders to the target-language reference.
        const auto& inst = *env.prompts(2)[1];
        const auto tokens = env.canonical_tokens(inst);
        CHECK(tokens.size() == env.length());
        const auto parsed = parse_response({env.render(tokens, env.languages()[2]), inst.target_language});
        CHECK(oracle_semantic_score(parsed, inst) == 1.0);

        // The prior puts the most mass on the canonical token everywhere in the pivot.
        const auto lp = env.initial_policy(0, 0).log_probs(1.0);
        const auto canon = env.canonical_tokens(*env.prompts(0)[0]);
        for (std::size_t p = 0; p < env.length(); ++p) {
            for (std::size_t v = 0; v < env.vocab_size(); ++v) {
                if (static_cast<int>(v) != canon[p]) CHECK(lp[p * env.vocab_size() + v] < lp[p * env.vocab_size() + canon[p]]);
            }
        }
        ToyTaskConfig bad;
        bad.prompts_per_language = 0;
        CHECK_THROWS_AS(ToyEnvironment{bad}, Error);
    }

    TEST_CASE("zero iterations returns just the initial evaluation") {
        ToyTrainer trainer({}, small_task(), {});
        const auto before = trainer.policies();
        const auto h = trainer.train(0);
        REQUIRE(h.size() == 1);
        CHECK(h[0].iteration == 0);
        CHECK(h[0].mean_reward.size() == 3);
        CHECK(trainer.policies() == before);
        CHECK_THROWS_AS(trainer.train(-1), Error);
    }

    TEST_CASE("zero learning rate leaves the policy bit-identical") {
        TrainerConfig c;
        c.learning_rate = 0;
        ToyTrainer trainer(c, small_task(), {});
        const auto before = trainer.policies();
        const auto h = trainer.train(5);
        CHECK(h.size() == 6);
        CHECK(trainer.policies() == before);
        CHECK(trainer.policies() == trainer.reference_policies());
        for (const auto& s : h) CHECK(s.kl == 0.0);
    }

    TEST_CASE("same seeds give byte-identical histories") {
        TrainerConfig c;
        c.seed = 9;
        ToyTrainer a(c, small_task(), {});
        ToyTrainer b(c, small_task(), {});
        const auto ha = history_to_jsonl(a.train(8));
        CHECK(ha == history_to_jsonl(b.train(8)));
        CHECK(a.policies() == b.policies());
        c.seed = 10;
        ToyTrainer other(c, small_task(), {});
        CHECK(ha != history_to_jsonl(other.train(8)));
    }

    TEST_CASE("pivot-only smoke run improves reward in every seed on average") {
        std::vector<double> mean_curve(11, 0.0);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            TrainerConfig c;
            c.seed = seed;
            auto task = small_task(0);
            task.task_seed = 100 + seed;
            ToyTrainer trainer(c, task, {});
            const auto h = trainer.train(10);
            REQUIRE(h.size() == 11);
            for (std::size_t i = 0; i < h.size(); ++i) {
                CHECK(std::isfinite(h[i].loss));
                CHECK(h[i].kl >= 0.0);
                mean_curve[i] += h[i].mean_reward.at("en") / 5.0;
            }
        }
        CHECK(least_squares_slope(mean_curve) > 0.0);
    }

    TEST_CASE("evaluation uses its own stream and leaves training state alone") {
        ToyTrainer trainer({}, small_task(), {});
        const auto e1 = trainer.evaluate(RewardConfig{}, 3);
        const auto e2 = trainer.evaluate(RewardConfig{}, 3);
        CHECK(e1 == e2);
        const auto h = trainer.train(1);
        ToyTrainer fresh({}, small_task(), {});
        CHECK(history_to_jsonl(fresh.train(1)) == history_to_jsonl(h));
    }

    TEST_CASE("history JSONL round trip and schema errors") {
        TempDir dir;
        ToyTrainer trainer({}, small_task(), {});
        const auto h = trainer.train(3);
        write_history(h, dir / "h.jsonl");
        CHECK(read_history(dir / "h.jsonl") == h);

        write_file(dir / "bad.jsonl", history_to_jsonl(h) + "{\"iteration\": \"x\"}\n");
        try {
            read_history(dir / "bad.jsonl");
            FAIL("expected SchemaViolation");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SchemaViolation);
            CHECK(std::string(e.what()).find("bad.jsonl:5") != std::string::npos);
        }
        try {
            read_history(dir / "missing.jsonl");
            FAIL("expected IoFailure");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::IoFailure);
        }
    }
}
