// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pivotrl/backends.hpp"
#include "pivotrl/parsing.hpp"
#include "pivotrl/reward.hpp"

namespace pivotrl {

enum class RecordStatus { Raw, Translated, Referenced, FilteredOut, Scored };

std::string_view to_string(RecordStatus status);
std::optional<RecordStatus> parse_record_status(std::string_view name);

// Filter reasons written by the stages below.
inline constexpr std::string_view kTranslationFailed = "translation_failed";
inline constexpr std::string_view kReferenceMalformed = "reference_malformed";
inline constexpr std::string_view kReferenceFailed = "reference_failed";
inline constexpr std::string_view kReferenceMissing = "reference_missing";

struct CorpusRecord {
    std::string id;
    std::string prompt;
    std::string prompt_language = std::string(kDefaultPivot);
    std::optional<ParsedResponse> pivot_reference;
    std::optional<std::string> source_prompt;  // the pivot-language prompt before translation
    std::optional<RawResponse> prediction;     // only used when scoring
    std::optional<RewardBreakdown> reward;
    RecordStatus status = RecordStatus::Raw;
    std::optional<std::string> filter_reason;

    bool operator==(const CorpusRecord&) const = default;
};

using Shard = std::vector<CorpusRecord>;

struct StageOptions {
    int workers = 1;  // records are processed concurrently; output order is input order
};

// Disjoint, size-balanced shards, one per language code, in the given order.
// Records keep their relative input order within a shard.
std::vector<Shard> partition(const Shard& records, const std::vector<std::string>& languages, std::uint64_t seed);

// Raw records get their prompt translated from their current language into
// `language`. Translating into the record's own language is a no-op copy.
Shard translate_prompts(Shard shard, std::string_view language, const Translator& translator,
                        const StageOptions& options = {});

// Translated records get a pivot reference generated from the pivot-language
// source prompt.
Shard generate_references(Shard shard, const ReferenceGenerator& generator,
                          std::string_view pivot = kDefaultPivot, const StageOptions& options = {});

// Marks every record that lacks a well-formed pivot reference as filtered_out.
Shard filter_ill_formed(Shard shard);

// Referenced records that carry a prediction get a reward and become scored.
// Provider errors propagate; records without a prediction are left untouched.
Shard score_records(Shard shard, const RewardEngine& engine, const RewardConfig& config,
                    const StageOptions& options = {});

std::size_t count_survivors(const Shard& shard);
std::size_t count_filtered(const Shard& shard);

nlohmann::json record_to_json(const CorpusRecord& record);
// Throws SchemaViolation (message names the problem) on a bad object.
CorpusRecord record_from_json(const nlohmann::json& j, std::string_view pivot = kDefaultPivot);

std::string shard_to_jsonl(const Shard& shard);
void persist(const Shard& shard, const std::filesystem::path& path);
// SchemaViolation messages carry "path:line".
Shard load(const std::filesystem::path& path, std::string_view pivot = kDefaultPivot);

}  // namespace pivotrl
