// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "pivotrl/config.hpp"
#include "pivotrl/error.hpp"

using namespace pivotrl;
using namespace pivotrl::testing;
using nlohmann::json;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("defaults are all in-process") {
        const auto c = default_config();
        CHECK(c.pivot == "en");
        CHECK(c.mode == "full");
        CHECK(c.provider(ProviderKind::Embedding).builtin == "aligned_bow");
        CHECK(c.provider(ProviderKind::Translation).builtin == "dictionary");
        CHECK(c.provider(ProviderKind::AnswerScorer).builtin == "token_f1");
        CHECK(c.provider(ProviderKind::ReferenceGenerator).builtin == "oracle");
        for (const auto& p : c.providers) CHECK_FALSE(p.descriptor.is_remote());
        CHECK(config_from_json(json::object()).mode == "full");
    }

    TEST_CASE("JSON overrides and strict keys") {
        const auto c = config_from_json(json::parse(R"({
            "mode": "comet_embed",
            "synthetic": {"seed": 3, "languages": ["pt-PT", "x1"]},
            "providers": {"embedding": {"builtin": "bow", "dims": 64},
                          "translation": {"endpoint": "http://127.0.0.1:1/t", "bearer_token": "s3cret", "max_retries": 0}},
            "service": {"port": 9000, "max_concurrent": 2}
        })"));
        CHECK(c.mode == "comet_embed");
        CHECK(c.synthetic.seed == 3);
        CHECK(c.synthetic.languages == std::vector<std::string>{"pt-PT", "x1"});
        CHECK(c.provider(ProviderKind::Embedding).dims == 64);
        CHECK(c.provider(ProviderKind::Translation).descriptor.is_remote());
        CHECK(c.provider(ProviderKind::Translation).descriptor.max_retries == 0);
        CHECK(c.service.port == 9000);

        CHECK(kind_of([] { config_from_json(json{{"modee", "full"}}); }) == ErrorKind::SchemaViolation);
        CHECK(kind_of([] { config_from_json(json{{"service", {{"port", "80"}}}}); }) == ErrorKind::SchemaViolation);
        CHECK(kind_of([] { config_from_json(json{{"providers", {{"embedding", {{"builtin", "oracle"}}}}}}); }) ==
              ErrorKind::InvalidArgument);
        CHECK_THROWS_AS(config_from_json(json{{"mode", "best"}}), Error);
    }

    TEST_CASE("loading from disk") {
        TempDir dir;
        write_file(dir / "c.json", R"({"pivot": "en", "cache": {"enabled": false}})");
        CHECK_FALSE(load_config(dir / "c.json").cache.enabled);
        write_file(dir / "broken.json", "{");
        CHECK(kind_of([&] { load_config(dir / "broken.json"); }) == ErrorKind::SchemaViolation);
        CHECK(kind_of([&] { load_config(dir / "nope.json"); }) == ErrorKind::IoFailure);
    }

    TEST_CASE("environment overrides make a slot remote and tokens are redacted") {
        auto c = default_config();
        const std::map<std::string, std::string> env{
            {"PIVOTRL_EMBEDDING_ENDPOINT", "http://127.0.0.1:9/embed"},
            {"PIVOTRL_EMBEDDING_TOKEN", "hunter2"},
            {"PIVOTRL_ANSWER_SCORER_TOKEN", "abc"},
        };
        apply_env_overrides(c, [&](const std::string& k) -> std::optional<std::string> {
            auto it = env.find(k);
            return it == env.end() ? std::nullopt : std::optional(it->second);
        });
        const auto& d = c.provider(ProviderKind::Embedding).descriptor;
        CHECK(d.endpoint == "http://127.0.0.1:9/embed");
        CHECK(d.bearer_token == "hunter2");
        CHECK_FALSE(c.provider(ProviderKind::Translation).descriptor.is_remote());

        const auto shown = redacted_json(c);
        const auto text = shown.dump();
        CHECK(text.find("hunter2") == std::string::npos);
        CHECK(text.find("abc") == std::string::npos);
        CHECK(shown["providers"]["embedding"]["bearer_token"] == "<redacted>");
        CHECK(shown["providers"]["embedding"]["remote"] == true);
        CHECK(shown["providers"]["translation"]["builtin"] == "dictionary");
    }

    TEST_CASE("built providers follow the config") {
        auto c = default_config();
        c.synthetic.languages = {"l1", "l2"};
        const auto rt = build_providers(c);
        CHECK(rt.cache != nullptr);
        CHECK(rt.base[0]->id() == "aligned_bow");
        CHECK(rt.providers.embedder != nullptr);
        // The synthetic languages match make_languages with the same seed.
        const auto langs = synthetic_languages(c);
        CHECK(langs[1] == make_languages(7, 2, pivot_vocabulary({1, 2}))[1]);
        const auto task = make_task_from_operands({3, 4}, langs[0]);
        CHECK(rt.providers.translator->translate(task.prompt, "l1", "en") == "3 + 4 =");

        c.cache.enabled = false;
        CHECK(build_providers(c).cache == nullptr);
    }
}
