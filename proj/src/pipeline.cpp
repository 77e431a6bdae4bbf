// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "pivotrl/error.hpp"
#include "pivotrl/parallel.hpp"
#include "pivotrl/random.hpp"
#include "pivotrl/text.hpp"

namespace pivotrl {

namespace {

constexpr std::string_view kStatusNames[] = {"raw", "translated", "referenced", "filtered_out", "scored"};

void drop(CorpusRecord& r, std::string_view reason) {
    r.status = RecordStatus::FilteredOut;
    r.filter_reason = std::string(reason);
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& value) {
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_string()) throw Error(ErrorKind::SchemaViolation, std::string("'") + key + "' must be a string or null");
    return j.at(key).get<std::string>();
}

std::string required_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorKind::SchemaViolation, std::string("missing '") + key + "'");
    if (!j.at(key).is_string()) throw Error(ErrorKind::SchemaViolation, std::string("'") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

double required_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw Error(ErrorKind::SchemaViolation, std::string("reward.") + key + " must be a number");
    }
    return j.at(key).get<double>();
}

}  // namespace

std::string_view to_string(RecordStatus status) { return kStatusNames[static_cast<int>(status)]; }

std::optional<RecordStatus> parse_record_status(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kStatusNames); ++i) {
        if (kStatusNames[i] == name) return static_cast<RecordStatus>(i);
    }
    return std::nullopt;
}

std::vector<Shard> partition(const Shard& records, const std::vector<std::string>& languages, std::uint64_t seed) {
    if (languages.empty()) throw Error(ErrorKind::InvalidArgument, "partition needs at least one language");
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    shuffle(order, rng);

    const std::size_t k = languages.size();
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < order.size(); ++i) members[i % k].push_back(order[i]);
    std::vector<Shard> shards(k);
    for (std::size_t s = 0; s < k; ++s) {
        std::sort(members[s].begin(), members[s].end());
        for (std::size_t idx : members[s]) shards[s].push_back(records[idx]);
    }
    return shards;
}

Shard translate_prompts(Shard shard, std::string_view language, const Translator& translator,
                        const StageOptions& options) {
    parallel_for(shard.size(), options.workers, [&](std::size_t i) {
        auto& r = shard[i];
        if (r.status != RecordStatus::Raw) return;
        try {
            std::string translated = r.prompt_language == language
                                         ? r.prompt
                                         : translator.translate(r.prompt, r.prompt_language, language);
            r.source_prompt = std::move(r.prompt);
            r.prompt = std::move(translated);
            r.prompt_language = std::string(language);
            r.status = RecordStatus::Translated;
        } catch (const Error&) {
            drop(r, kTranslationFailed);
        }
    });
    return shard;
}

Shard generate_references(Shard shard, const ReferenceGenerator& generator, std::string_view pivot,
                          const StageOptions& options) {
    parallel_for(shard.size(), options.workers, [&](std::size_t i) {
        auto& r = shard[i];
        if (r.status != RecordStatus::Translated) return;
        try {
            r.pivot_reference = generator.generate_reference(r.source_prompt.value_or(r.prompt), pivot);
            r.status = RecordStatus::Referenced;
        } catch (const Error& e) {
            drop(r, e.kind() == ErrorKind::RecordRejected ? kReferenceMalformed : kReferenceFailed);
        }
    });
    return shard;
}

Shard filter_ill_formed(Shard shard) {
    for (auto& r : shard) {
        if (r.status == RecordStatus::FilteredOut) continue;
        if (!r.pivot_reference) {
            drop(r, kReferenceMissing);
        } else if (format_reward(*r.pivot_reference) == 0) {
            drop(r, kReferenceMalformed);
        }
    }
    return shard;
}

Shard score_records(Shard shard, const RewardEngine& engine, const RewardConfig& config,
                    const StageOptions& options) {
    parallel_for(shard.size(), options.workers, [&](std::size_t i) {
        auto& r = shard[i];
        if (r.status != RecordStatus::Referenced && r.status != RecordStatus::Scored) return;
        if (!r.prediction || !r.pivot_reference) return;
        r.reward = engine.score(parse_response(*r.prediction), *r.pivot_reference, config);
        r.status = RecordStatus::Scored;
    });
    return shard;
}

std::size_t count_filtered(const Shard& shard) {
    return static_cast<std::size_t>(std::count_if(shard.begin(), shard.end(), [](const CorpusRecord& r) {
        return r.status == RecordStatus::FilteredOut;
    }));
}

std::size_t count_survivors(const Shard& shard) { return shard.size() - count_filtered(shard); }

nlohmann::json record_to_json(const CorpusRecord& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["prompt"] = r.prompt;
    j["prompt_language"] = r.prompt_language;
    j["source_prompt"] = optional_json(r.source_prompt);
    j["reference_reasoning"] = r.pivot_reference ? nlohmann::json(r.pivot_reference->reasoning) : nullptr;
    j["reference_answer"] = r.pivot_reference ? nlohmann::json(r.pivot_reference->answer) : nullptr;
    j["status"] = to_string(r.status);
    j["filter_reason"] = optional_json(r.filter_reason);
    if (r.prediction) {
        j["prediction"] = {{"text", r.prediction->text}, {"language", r.prediction->language}};
    } else {
        j["prediction"] = nullptr;
    }
    if (r.reward) {
        const auto& w = *r.reward;
        j["reward"] = {{"r_answer", w.r_answer}, {"r_embed", w.r_embed},         {"r_trans_emb", w.r_trans_emb},
                       {"r_fmt", w.r_fmt},       {"r_reasoning", w.r_reasoning}, {"total", w.total}};
    } else {
        j["reward"] = nullptr;
    }
    return j;
}

CorpusRecord record_from_json(const nlohmann::json& j, std::string_view pivot) {
    if (!j.is_object()) throw Error(ErrorKind::SchemaViolation, "record is not a JSON object");
    CorpusRecord r;
    r.id = required_string(j, "id");
    r.prompt = required_string(j, "prompt");
    r.prompt_language = optional_string(j, "prompt_language").value_or(std::string(pivot));
    r.source_prompt = optional_string(j, "source_prompt");
    const auto reasoning = optional_string(j, "reference_reasoning");
    const auto answer = optional_string(j, "reference_answer");
    if (reasoning.has_value() != answer.has_value()) {
        throw Error(ErrorKind::SchemaViolation, "reference_reasoning and reference_answer must both be set or both null");
    }
    if (answer) r.pivot_reference = make_reference(*reasoning, *answer, pivot);

    const auto status = parse_record_status(j.contains("status") ? j.at("status").get<std::string>() : "raw");
    if (!status) throw Error(ErrorKind::SchemaViolation, "unknown status");
    r.status = *status;
    r.filter_reason = optional_string(j, "filter_reason");
    if (r.status == RecordStatus::FilteredOut && !r.filter_reason) {
        throw Error(ErrorKind::SchemaViolation, "filtered_out record without filter_reason");
    }

    if (j.contains("prediction") && !j.at("prediction").is_null()) {
        const auto& p = j.at("prediction");
        if (!p.is_object()) throw Error(ErrorKind::SchemaViolation, "'prediction' must be an object");
        r.prediction = RawResponse{required_string(p, "text"), required_string(p, "language")};
    }
    if (j.contains("reward") && !j.at("reward").is_null()) {
        const auto& w = j.at("reward");
        if (!w.is_object()) throw Error(ErrorKind::SchemaViolation, "'reward' must be an object");
        RewardBreakdown b;
        b.r_answer = required_number(w, "r_answer");
        b.r_embed = required_number(w, "r_embed");
        b.r_trans_emb = required_number(w, "r_trans_emb");
        b.r_fmt = static_cast<int>(required_number(w, "r_fmt"));
        b.total = required_number(w, "total");
        b.r_reasoning = w.contains("r_reasoning") ? required_number(w, "r_reasoning") : b.r_embed + b.r_trans_emb;
        r.reward = b;
    }
    return r;
}

std::string shard_to_jsonl(const Shard& shard) {
    std::string out;
    for (const auto& r : shard) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

void persist(const Shard& shard, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
    f << shard_to_jsonl(shard);
    f.close();
    if (!f) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

Shard load(const std::filesystem::path& path, std::string_view pivot) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
    Shard out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(f, line)) {
        ++number;
        if (text::is_blank(line)) continue;
        const std::string where = path.string() + ":" + std::to_string(number);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::SchemaViolation, where + ": invalid JSON");
        }
        try {
            out.push_back(record_from_json(j, pivot));
        } catch (const Error& e) {
            throw Error(ErrorKind::SchemaViolation, where + ": " + e.detail());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::SchemaViolation, where + ": " + e.what());
        }
    }
    if (f.bad()) throw Error(ErrorKind::IoFailure, "read failed: " + path.string());
    return out;
}

}  // namespace pivotrl
