// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pivotrl/parsing.hpp"

namespace pivotrl {

inline constexpr std::string_view kDefaultPivot = "en";

struct Difficulty {
    int digits = 1;
    int terms = 2;
};

// Tokens needed to state and solve every addition task of the given
// difficulty: the integers 0..terms*(10^digits - 1), then "+", "=", ";".
std::vector<std::string> pivot_vocabulary(Difficulty difficulty);

// A relabeling of the pivot vocabulary. Tokens outside the vocabulary pass
// through both directions unchanged.
class SyntheticLanguage {
public:
    SyntheticLanguage(std::string code, std::map<std::string, std::string> pivot_to_language);

    // Identity map over the vocabulary; stands for the pivot language itself.
    static SyntheticLanguage pivot(std::vector<std::string> vocab,
                                   std::string code = std::string(kDefaultPivot));

    const std::string& code() const noexcept { return code_; }
    const std::map<std::string, std::string>& token_map() const noexcept { return forward_; }
    bool is_identity() const noexcept { return identity_; }
    bool covers(const std::string& pivot_token) const { return forward_.count(pivot_token) > 0; }

    std::string to_language(const std::string& pivot_token) const;
    std::string to_pivot(const std::string& token) const;

    // Token-wise mapping of whitespace-separated text; output is single-spaced.
    std::string to_language_text(std::string_view pivot_text) const;
    std::string to_pivot_text(std::string_view text) const;

    bool operator==(const SyntheticLanguage& other) const {
        return code_ == other.code_ && forward_ == other.forward_;
    }

private:
    std::string code_;
    std::map<std::string, std::string> forward_;
    std::map<std::string, std::string> inverse_;
    bool identity_ = false;
};

// k languages with codes "l1".."lk".
std::vector<SyntheticLanguage> make_languages(std::uint64_t seed, int k,
                                              const std::vector<std::string>& vocab);
// One language per given code; the i-th language is identical to the i-th
// language of the k-overload with the same seed.
std::vector<SyntheticLanguage> make_languages(std::uint64_t seed,
                                              const std::vector<std::string>& codes,
                                              const std::vector<std::string>& vocab);

struct SyntheticTaskInstance {
    std::string prompt;  // in the target language
    std::string target_language;
    ParsedResponse pivot_reference;
    std::string canonical_answer;
    std::vector<long long> operands;
    SyntheticLanguage language;
};

// Pivot-language rendering of a task: "a + b + c =".
std::string pivot_prompt(const std::vector<long long>& operands);
// Partial-sum reasoning, e.g. "2 + 3 = 5 ; 5 + 4 = 9".
std::string pivot_reasoning(const std::vector<long long>& operands);

SyntheticTaskInstance make_task(std::uint64_t seed, const SyntheticLanguage& language,
                                Difficulty difficulty,
                                std::string_view pivot_code = kDefaultPivot);
SyntheticTaskInstance make_task_from_operands(const std::vector<long long>& operands,
                                              const SyntheticLanguage& language,
                                              std::string_view pivot_code = kDefaultPivot);

// The same task, written as a response in the instance's target language.
std::string render_target_response(const SyntheticTaskInstance& instance);

// 1.0: answer and reasoning both match the reference after mapping back to
// pivot tokens; 0.5: only the answer matches; 0.0 otherwise or malformed.
double oracle_semantic_score(const ParsedResponse& pred, const SyntheticTaskInstance& instance);

}  // namespace pivotrl
