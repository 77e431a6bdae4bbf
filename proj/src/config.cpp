// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>

#include "pivotrl/error.hpp"
#include "pivotrl/remote.hpp"
#include "pivotrl/reward.hpp"

namespace pivotrl {

namespace {

using nlohmann::json;

constexpr ProviderKind kKinds[] = {ProviderKind::Embedding, ProviderKind::Translation, ProviderKind::AnswerScorer,
                                   ProviderKind::ReferenceGenerator};

constexpr std::string_view kDefaultBuiltin[] = {"aligned_bow", "dictionary", "token_f1", "oracle"};

std::string env_prefix(ProviderKind kind) {
    std::string name(to_string(kind));
    for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return "PIVOTRL_" + name;
}

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw Error(ErrorKind::SchemaViolation, std::string(where) + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorKind::SchemaViolation, "unknown key '" + key + "' in " + std::string(where));
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, std::string_view where) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const json::exception&) {
        throw Error(ErrorKind::SchemaViolation, std::string(where) + "." + key + " has the wrong type");
    }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out, std::string_view where) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    T value{};
    read(j, key, value, where);
    out = std::move(value);
}

void read_provider(const json& j, ProviderKind kind, ProviderConfig& pc) {
    const std::string where = "providers." + std::string(to_string(kind));
    check_keys(j, where,
               {"builtin", "dims", "id", "endpoint", "model", "timeout_ms", "max_retries", "batch_limit", "bearer_token"});
    auto& d = pc.descriptor;
    read(j, "builtin", pc.builtin, where);
    read(j, "dims", pc.dims, where);
    read(j, "id", d.id, where);
    read_optional(j, "endpoint", d.endpoint, where);
    read_optional(j, "model", d.model_name, where);
    read(j, "timeout_ms", d.timeout_ms, where);
    read(j, "max_retries", d.max_retries, where);
    read(j, "batch_limit", d.batch_limit, where);
    read_optional(j, "bearer_token", d.bearer_token, where);
    if (d.endpoint && (!j.contains("id"))) d.id = "remote_" + std::string(to_string(kind));
}

}  // namespace

void AppConfig::validate() const {
    if (pivot.empty()) throw Error(ErrorKind::InvalidArgument, "pivot language must be non-empty");
    if (find_preset(mode) == nullptr) throw Error(ErrorKind::InvalidArgument, "unknown reward mode '" + mode + "'");
    if (synthetic.languages.empty()) throw Error(ErrorKind::InvalidArgument, "synthetic.languages must be non-empty");
    if (std::set<std::string>(synthetic.languages.begin(), synthetic.languages.end()).size() !=
        synthetic.languages.size()) {
        throw Error(ErrorKind::InvalidArgument, "synthetic.languages has duplicates");
    }
    if (synthetic.difficulty.digits < 1 || synthetic.difficulty.terms < 2) {
        throw Error(ErrorKind::InvalidArgument, "synthetic difficulty needs digits >= 1 and terms >= 2");
    }
    for (auto kind : kKinds) {
        const auto& pc = provider(kind);
        pc.descriptor.validate();
        if (pc.descriptor.kind != kind) throw Error(ErrorKind::InvalidArgument, "provider slot kind mismatch");
        if (pc.descriptor.is_remote()) continue;
        static const std::set<std::string> allowed[] = {
            {"bow", "aligned_bow"}, {"dictionary"}, {"token_f1"}, {"oracle"}};
        if (allowed[static_cast<std::size_t>(kind)].count(pc.builtin) == 0) {
            throw Error(ErrorKind::InvalidArgument,
                        "unknown builtin '" + pc.builtin + "' for " + std::string(to_string(kind)));
        }
        if (pc.dims == 0) throw Error(ErrorKind::InvalidArgument, "embedding dims must be >= 1");
    }
    if (service.port < 0 || service.port > 65535) throw Error(ErrorKind::InvalidArgument, "service.port out of range");
    if (service.max_concurrent < 1) throw Error(ErrorKind::InvalidArgument, "service.max_concurrent must be >= 1");
    if (service.max_body_bytes < 1) throw Error(ErrorKind::InvalidArgument, "service.max_body_bytes must be >= 1");
}

AppConfig default_config() {
    AppConfig c;
    for (auto kind : kKinds) {
        auto& pc = c.provider(kind);
        pc.builtin = std::string(kDefaultBuiltin[static_cast<std::size_t>(kind)]);
        pc.descriptor.kind = kind;
        pc.descriptor.id = pc.builtin;
    }
    return c;
}

AppConfig config_from_json(const json& j) {
    AppConfig c = default_config();
    check_keys(j, "config", {"pivot", "mode", "synthetic", "providers", "cache", "service"});
    read(j, "pivot", c.pivot, "config");
    read(j, "mode", c.mode, "config");
    if (j.contains("synthetic")) {
        const auto& s = j.at("synthetic");
        check_keys(s, "synthetic", {"seed", "languages", "digits", "terms"});
        read(s, "seed", c.synthetic.seed, "synthetic");
        read(s, "languages", c.synthetic.languages, "synthetic");
        read(s, "digits", c.synthetic.difficulty.digits, "synthetic");
        read(s, "terms", c.synthetic.difficulty.terms, "synthetic");
    }
    if (j.contains("providers")) {
        const auto& p = j.at("providers");
        check_keys(p, "providers", {"embedding", "translation", "answer_scorer", "reference_generator"});
        for (auto kind : kKinds) {
            const std::string key(to_string(kind));
            if (!p.contains(key)) continue;
            auto& pc = c.provider(kind);
            read_provider(p.at(key), kind, pc);
            if (!p.at(key).contains("id") && !pc.descriptor.is_remote()) pc.descriptor.id = pc.builtin;
        }
    }
    if (j.contains("cache")) {
        const auto& s = j.at("cache");
        check_keys(s, "cache", {"enabled", "directory"});
        read(s, "enabled", c.cache.enabled, "cache");
        std::optional<std::string> dir;
        read_optional(s, "directory", dir, "cache");
        if (dir) c.cache.directory = *dir;
    }
    if (j.contains("service")) {
        const auto& s = j.at("service");
        check_keys(s, "service", {"host", "port", "max_concurrent", "max_body_bytes", "log_requests"});
        read(s, "host", c.service.host, "service");
        read(s, "port", c.service.port, "service");
        read(s, "max_concurrent", c.service.max_concurrent, "service");
        read(s, "max_body_bytes", c.service.max_body_bytes, "service");
        read(s, "log_requests", c.service.log_requests, "service");
    }
    c.validate();
    return c;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoFailure, "cannot open config " + path.string());
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::SchemaViolation, path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::optional<std::string> system_env(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

void apply_env_overrides(AppConfig& config, const EnvLookup& env) {
    for (auto kind : kKinds) {
        auto& d = config.provider(kind).descriptor;
        const auto prefix = env_prefix(kind);
        if (auto endpoint = env(prefix + "_ENDPOINT")) {
            if (!d.is_remote() && d.id == config.provider(kind).builtin) d.id = "remote_" + std::string(to_string(kind));
            d.endpoint = *endpoint;
        }
        if (auto token = env(prefix + "_TOKEN")) d.bearer_token = *token;
    }
    config.validate();
}

json redacted_json(const AppConfig& config) {
    json providers = json::object();
    for (auto kind : kKinds) {
        const auto& pc = config.provider(kind);
        const auto& d = pc.descriptor;
        json p{{"id", d.id}, {"remote", d.is_remote()}};
        if (d.is_remote()) {
            p["endpoint"] = *d.endpoint;
            p["model"] = d.model_name ? json(*d.model_name) : json(nullptr);
            p["timeout_ms"] = d.timeout_ms;
            p["max_retries"] = d.max_retries;
            p["batch_limit"] = d.batch_limit;
            p["bearer_token"] = d.bearer_token ? json("<redacted>") : json(nullptr);
        } else {
            p["builtin"] = pc.builtin;
            if (kind == ProviderKind::Embedding) p["dims"] = pc.dims;
        }
        providers[std::string(to_string(kind))] = std::move(p);
    }
    return json{
        {"pivot", config.pivot},
        {"mode", config.mode},
        {"synthetic",
         {{"seed", config.synthetic.seed},
          {"languages", config.synthetic.languages},
          {"digits", config.synthetic.difficulty.digits},
          {"terms", config.synthetic.difficulty.terms}}},
        {"providers", providers},
        {"cache",
         {{"enabled", config.cache.enabled},
          {"directory", config.cache.directory ? json(config.cache.directory->string()) : json(nullptr)}}},
        {"service",
         {{"host", config.service.host},
          {"port", config.service.port},
          {"max_concurrent", config.service.max_concurrent},
          {"max_body_bytes", config.service.max_body_bytes},
          {"log_requests", config.service.log_requests}}},
    };
}

std::vector<SyntheticLanguage> synthetic_languages(const AppConfig& config) {
    return make_languages(config.synthetic.seed, config.synthetic.languages,
                          pivot_vocabulary(config.synthetic.difficulty));
}

ProviderRuntime build_providers(const AppConfig& config) {
    config.validate();
    const auto languages = synthetic_languages(config);
    auto all_languages = languages;
    all_languages.insert(all_languages.begin(),
                         SyntheticLanguage::pivot(pivot_vocabulary(config.synthetic.difficulty), config.pivot));

    ProviderRuntime rt;
    const auto& emb = config.provider(ProviderKind::Embedding);
    std::shared_ptr<const Embedder> embedder;
    if (emb.descriptor.is_remote()) {
        embedder = std::make_shared<const RemoteEmbedder>(emb.descriptor);
    } else if (emb.builtin == "bow") {
        embedder = std::make_shared<const BagOfWordsEmbedder>(emb.dims, emb.descriptor.id);
    } else {
        embedder = std::make_shared<const AlignedBagOfWordsEmbedder>(languages, config.pivot, emb.dims, emb.descriptor.id);
    }

    const auto& tr = config.provider(ProviderKind::Translation);
    std::shared_ptr<const Translator> translator;
    if (tr.descriptor.is_remote()) {
        translator = std::make_shared<const RemoteTranslator>(tr.descriptor);
    } else {
        translator = std::make_shared<const DictionaryTranslator>(languages, config.pivot, tr.descriptor.id);
    }

    const auto& sc = config.provider(ProviderKind::AnswerScorer);
    std::shared_ptr<const AnswerScorer> scorer;
    if (sc.descriptor.is_remote()) {
        scorer = std::make_shared<const RemoteAnswerScorer>(sc.descriptor);
    } else {
        // TokenF1 needs an exact path back to pivot tokens, which only the
        // dictionary offers; with a remote translator it uses its own copy.
        auto to_pivot = tr.descriptor.is_remote()
                            ? std::make_shared<const DictionaryTranslator>(languages, config.pivot)
                            : translator;
        scorer = std::make_shared<const TokenF1AnswerScorer>(to_pivot, config.pivot, sc.descriptor.id);
    }

    const auto& rg = config.provider(ProviderKind::ReferenceGenerator);
    std::shared_ptr<const ReferenceGenerator> generator;
    if (rg.descriptor.is_remote()) {
        generator = std::make_shared<const RemoteReferenceGenerator>(rg.descriptor);
    } else {
        generator = std::make_shared<const OracleReferenceGenerator>(all_languages, rg.descriptor.id);
    }

    rt.base = {embedder, translator, scorer, generator};
    ProviderSet plain{embedder, translator, scorer, generator};
    if (config.cache.enabled) {
        rt.cache = std::make_shared<ContentCache>(config.cache);
        rt.providers = with_cache(plain, rt.cache);
    } else {
        rt.providers = plain;
    }
    return rt;
}

}  // namespace pivotrl
