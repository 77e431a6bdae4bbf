// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pivotrl/backends.hpp"
#include "pivotrl/cache.hpp"
#include "pivotrl/synthlang.hpp"

namespace pivotrl {

// One provider slot. Remote when descriptor.endpoint is set, otherwise the
// named in-process backend.
struct ProviderConfig {
    std::string builtin;  // bow | aligned_bow | dictionary | token_f1 | oracle
    std::size_t dims = kDefaultBowDims;
    ProviderDescriptor descriptor;
};

struct SyntheticConfig {
    std::uint64_t seed = 7;
    std::vector<std::string> languages{"l1", "l2", "l3", "l4"};
    Difficulty difficulty;
};

struct ServiceSettings {
    std::string host = "127.0.0.1";
    int port = 8080;
    int max_concurrent = 64;
    std::size_t max_body_bytes = 1 << 20;
    bool log_requests = true;
};

struct AppConfig {
    std::string pivot = std::string(kDefaultPivot);
    std::string mode = "full";
    SyntheticConfig synthetic;
    // Indexed by ProviderKind.
    std::array<ProviderConfig, 4> providers;
    CacheSettings cache;
    ServiceSettings service;

    ProviderConfig& provider(ProviderKind kind) { return providers[static_cast<std::size_t>(kind)]; }
    const ProviderConfig& provider(ProviderKind kind) const { return providers[static_cast<std::size_t>(kind)]; }

    void validate() const;
};

AppConfig default_config();
// Missing keys keep their defaults; unknown keys and wrong types are a
// SchemaViolation.
AppConfig config_from_json(const nlohmann::json& j);
AppConfig load_config(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> system_env(const std::string& name);

// PIVOTRL_<KIND>_ENDPOINT and PIVOTRL_<KIND>_TOKEN for KIND in EMBEDDING,
// TRANSLATION, ANSWER_SCORER, REFERENCE_GENERATOR. An endpoint override turns
// that slot remote.
void apply_env_overrides(AppConfig& config, const EnvLookup& env = system_env);

// The active configuration with bearer tokens replaced by "<redacted>".
nlohmann::json redacted_json(const AppConfig& config);

std::vector<SyntheticLanguage> synthetic_languages(const AppConfig& config);

struct ProviderRuntime {
    ProviderSet providers;                               // what the engine uses (cache-wrapped if enabled)
    std::array<std::shared_ptr<const Provider>, 4> base;  // unwrapped, indexed by ProviderKind
    std::shared_ptr<ContentCache> cache;
};

ProviderRuntime build_providers(const AppConfig& config);

}  // namespace pivotrl
