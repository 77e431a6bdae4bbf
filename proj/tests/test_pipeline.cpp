// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "pivotrl/error.hpp"
#include "pivotrl/pipeline.hpp"

using namespace pivotrl;
using namespace pivotrl::testing;

namespace {

Shard corpus(std::size_t n) {
    Shard out;
    for (std::size_t i = 0; i < n; ++i) {
        CorpusRecord r;
        r.id = "r" + std::to_string(i);
        r.prompt = pivot_prompt({static_cast<long long>(i % 10), static_cast<long long>((i * 7) % 10)});
        out.push_back(r);
    }
    return out;
}

// Refuses any text containing the token "9".
class PickyTranslator final : public Translator {
public:
    PickyTranslator() : Translator(ProviderDescriptor{.kind = ProviderKind::Translation, .id = "picky"}) {}

protected:
    std::string translate_one(const std::string& text, std::string_view, std::string_view) const override {
        if (text.find('9') != std::string::npos) throw Error(ErrorKind::ProviderUnavailable, "refused");
        return "T(" + text + ")";
    }
};

}  // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("partition is disjoint, balanced, order-preserving and seeded") {
        const auto records = corpus(103);
        const std::vector<std::string> langs{"l1", "l2", "l3", "l4"};
        const auto shards = partition(records, langs, 5);
        REQUIRE(shards.size() == 4);
        std::set<std::string> ids;
        std::size_t lo = SIZE_MAX, hi = 0;
        for (const auto& s : shards) {
            lo = std::min(lo, s.size());
            hi = std::max(hi, s.size());
            int prev = -1;
            for (const auto& r : s) {
                CHECK(ids.insert(r.id).second);
                const int idx = std::stoi(r.id.substr(1));
                CHECK(idx > prev);
                prev = idx;
            }
        }
        CHECK(ids.size() == 103);
        CHECK(hi - lo <= 1);
        CHECK(partition(records, langs, 5) == shards);
        CHECK_FALSE(partition(records, langs, 6) == shards);
        CHECK_THROWS_AS(pivotrl::partition(records, std::vector<std::string>{}, 5), Error);
    }

    TEST_CASE("translation keeps the source prompt and drops failures") {
        PickyTranslator t;
        auto shard = translate_prompts(corpus(10), "l1", t, {.workers = 3});
        for (const auto& r : shard) {
            if (r.source_prompt && r.source_prompt->find('9') == std::string::npos) {
                CHECK(r.status == RecordStatus::Translated);
                CHECK(r.prompt == "T(" + *r.source_prompt + ")");
                CHECK(r.prompt_language == "l1");
            } else {
                CHECK(r.status == RecordStatus::FilteredOut);
                CHECK(r.filter_reason == std::string(kTranslationFailed));
                CHECK(r.prompt.find('9') != std::string::npos);
            }
        }
        // Into the record's own language: no provider call.
        const auto same = translate_prompts(corpus(4), "en", t);
        CHECK(t.calls() == 10);
        for (const auto& r : same) {
            CHECK(r.status == RecordStatus::Translated);
            CHECK(r.prompt == *r.source_prompt);
        }
    }

    TEST_CASE("references come from the pivot prompt; malformed ones are filtered") {
        World w;
        auto shard = translate_prompts(corpus(12), "l2", *w.translator);
        const auto referenced = generate_references(shard, *w.generator, "en", {.workers = 4});
        for (const auto& r : referenced) {
            CHECK(r.status == RecordStatus::Referenced);
            REQUIRE(r.pivot_reference);
            CHECK(r.pivot_reference->language == "en");
            CHECK(r.pivot_reference->well_formed);
        }
        CHECK(filter_ill_formed(referenced) == referenced);

        const auto rejected = generate_references(shard, FixedGenerator("just text"));
        for (const auto& r : rejected) CHECK(r.filter_reason == std::string(kReferenceMalformed));
        CHECK(count_filtered(rejected) == 12);
        CHECK(count_survivors(rejected) == 0);

        // A translated record that never got a reference.
        const auto filtered = filter_ill_formed(shard);
        for (const auto& r : filtered) CHECK(r.filter_reason == std::string(kReferenceMissing));
    }

    TEST_CASE("scoring fills rewards only where a prediction exists") {
        World w;
        auto shard = generate_references(translate_prompts(corpus(6), "l1", *w.translator), *w.generator);
        const auto ref = *shard[0].pivot_reference;
        shard[0].prediction = RawResponse{render_response(ref.reasoning, ref.answer), "en"};
        const RewardEngine engine(w.providers());
        const auto scored = score_records(shard, engine, RewardConfig{});
        CHECK(scored[0].status == RecordStatus::Scored);
        CHECK(scored[0].reward->total == 3.0);
        for (std::size_t i = 1; i < scored.size(); ++i) {
            CHECK(scored[i].status == RecordStatus::Referenced);
            CHECK_FALSE(scored[i].reward);
        }
    }

    TEST_CASE("JSONL round trip, null fields and schema errors") {
        World w;
        TempDir dir;
        auto shard = generate_references(translate_prompts(corpus(8), "l3", *w.translator), *w.generator);
        shard[1] = filter_ill_formed(generate_references(translate_prompts({corpus(2)[1]}, "l3", *w.translator),
                                                         FixedGenerator("x")))[0];
        shard[2].prediction = RawResponse{"<think>a</think><answer>b</answer>", "l3"};
        shard[2] = score_records({shard[2]}, RewardEngine(w.providers()), RewardConfig{})[0];
        persist(shard, dir / "s.jsonl");
        CHECK(load(dir / "s.jsonl") == shard);
        CHECK(read_file(dir / "s.jsonl") == shard_to_jsonl(shard));

        const auto j = record_to_json(shard[0]);
        for (const char* key : {"id", "prompt", "prompt_language", "source_prompt", "reference_reasoning", "reference_answer", "reward", "status", "filter_reason"}) {
            CHECK(j.contains(key));
        }
        CHECK(j["reward"].is_null());
        CHECK(j["filter_reason"].is_null());
        CHECK(j["status"] == "referenced");
        CHECK(j["reference_answer"] == shard[0].pivot_reference->answer);

        write_file(dir / "bad.jsonl", shard_to_jsonl(shard) + "{\"prompt\": \"1 + 1 =\"}\n");
        try {
            load(dir / "bad.jsonl");
            FAIL("expected SchemaViolation");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SchemaViolation);
            CHECK(std::string(e.what()).find("bad.jsonl:9") != std::string::npos);
        }
        // prompt_language may be omitted on input.
        const auto minimal = record_from_json(nlohmann::json{{"id", "x"}, {"prompt", "1 + 1 ="}});
        CHECK(minimal.prompt_language == "en");
        CHECK(minimal.status == RecordStatus::Raw);
        CHECK_THROWS_AS(record_from_json(nlohmann::json{{"id", "x"}, {"prompt", "p"}, {"status", "weird"}}), Error);
    }

    TEST_CASE("end to end over four languages is conserved and reproducible") {
        World w;
        const auto records = corpus(400);
        auto run = [&] {
            std::string bytes;
            std::size_t total = 0;
            const auto shards = partition(records, {"l1", "l2", "l3", "l4"}, 1);
            for (std::size_t s = 0; s < shards.size(); ++s) {
                auto shard = translate_prompts(shards[s], w.lang(static_cast<int>(s)).code(), *w.translator, {.workers = 4});
                shard = filter_ill_formed(generate_references(shard, *w.generator, "en", {.workers = 4}));
                total += count_survivors(shard) + count_filtered(shard);
                bytes += shard_to_jsonl(shard);
            }
            CHECK(total == 400);
            return bytes;
        };
        CHECK(run() == run());
    }
}
