// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <thread>

#include "doctest.h"
#include "fixtures.hpp"
#include "pivotrl/cache.hpp"

using namespace pivotrl;
using namespace pivotrl::testing;

TEST_SUITE("cache") {
    TEST_CASE("sha256 known vectors") {
        CHECK(to_hex(sha256("")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        CHECK(to_hex(sha256("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("cache keys ignore field insertion order") {
        nlohmann::json a;
        a["model"] = "m";
        a["input"] = {"x"};
        a["language"] = "es";
        nlohmann::json b;
        b["language"] = "es";
        b["input"] = {"x"};
        b["model"] = "m";
        CHECK(make_cache_key("p", a) == make_cache_key("p", b));
        CHECK_FALSE(make_cache_key("p", a) == make_cache_key("q", a));
        b["language"] = "fr";
        CHECK_FALSE(make_cache_key("p", a) == make_cache_key("p", b));
        CHECK(canonical_json(a) == R"({"input":["x"],"language":"es","model":"m"})");
    }

    TEST_CASE("identical embed calls reach the provider once") {
        auto inner = std::make_shared<BagOfWordsEmbedder>();
        auto cache = std::make_shared<ContentCache>();
        CachingEmbedder e(inner, cache);
        const auto first = e.embed({"a b"}, "en");
        const auto second = e.embed({"a b"}, "en");
        CHECK(inner->calls() == 1);
        CHECK(first == second);
        e.embed({"c d"}, "en");
        CHECK(inner->calls() == 2);
        // Mixed hit and miss: only the miss is fetched, in one call.
        e.embed({"a b", "e f", "c d", "g"}, "en");
        CHECK(inner->calls() == 3);
    }

    TEST_CASE("a disabled cache passes every call through") {
        auto inner = std::make_shared<BagOfWordsEmbedder>();
        auto cache = std::make_shared<ContentCache>(CacheSettings{.enabled = false, .directory = std::nullopt});
        CachingEmbedder e(inner, cache);
        for (int i = 0; i < 5; ++i) e.embed({"a b"}, "en");
        CHECK(inner->calls() == 5);
        CHECK(cache->size() == 0);
    }

    TEST_CASE("translator, scorer and generator wrappers") {
        World w;
        auto cache = std::make_shared<ContentCache>();
        const auto cached = with_cache(w.providers(), cache);
        for (int i = 0; i < 3; ++i) {
            cached.translator->translate("1 + 2", "en", "l1");
            cached.answer_scorer->score("3", "3", "en");
            cached.reference_generator->generate_reference("1 + 2 =");
        }
        CHECK(w.translator->calls() == 1);
        CHECK(w.scorer->calls() == 1);
        CHECK(w.generator->calls() == 1);
    }

    TEST_CASE("write-through directory survives a new cache instance bit-exactly") {
        TempDir dir;
        auto inner = std::make_shared<BagOfWordsEmbedder>(32);
        std::vector<EmbeddingVector> first;
        {
            CachingEmbedder e(inner, std::make_shared<ContentCache>(CacheSettings{.directory = dir.path()}));
            first = e.embed({"x y z", "w"}, "en");
        }
        CHECK(inner->calls() == 1);
        CachingEmbedder again(inner, std::make_shared<ContentCache>(CacheSettings{.directory = dir.path()}));
        CHECK(again.embed({"x y z", "w"}, "en") == first);
        CHECK(inner->calls() == 1);
    }

    TEST_CASE("concurrent readers and writers agree") {
        auto inner = std::make_shared<BagOfWordsEmbedder>();
        auto cache = std::make_shared<ContentCache>();
        CachingEmbedder e(inner, cache);
        const auto expected = inner->embed({"t0", "t1", "t2", "t3"}, "en");
        std::vector<std::jthread> threads;
        std::atomic<int> mismatches{0};
        for (int t = 0; t < 8; ++t) {
            threads.emplace_back([&, t] {
                for (int i = 0; i < 200; ++i) {
                    const int k = (i + t) % 4;
                    if (!(e.embed({"t" + std::to_string(k)}, "en")[0] == expected[static_cast<std::size_t>(k)])) {
                        ++mismatches;
                    }
                }
            });
        }
        threads.clear();
        CHECK(mismatches == 0);
        CHECK(cache->size() == 4);
    }
}
