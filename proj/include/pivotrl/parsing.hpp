// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace pivotrl {

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kAnswerOpen = "<answer>";
inline constexpr std::string_view kAnswerClose = "</answer>";

struct RawResponse {
    std::string text;
    std::string language;

    bool operator==(const RawResponse&) const = default;
};

// A response split into its reasoning and answer parts.
//
// Invariants: well_formed == false implies both parts are empty;
// well_formed == true implies the answer is non-blank.
struct ParsedResponse {
    std::string reasoning;
    std::string answer;
    bool well_formed = false;
    std::string language;

    bool operator==(const ParsedResponse&) const = default;
};

// Accepts exactly one <think> block followed by exactly one <answer> block,
// with nothing but ASCII whitespace before, between and after them. Tags are
// literal and case-sensitive. Never throws on malformed input.
ParsedResponse parse_response(const RawResponse& raw);

// 1 iff the response passed the structure gate.
int format_reward(const ParsedResponse& parsed) noexcept;

// Inverse of parse_response for well-formed responses.
std::string render_response(std::string_view reasoning, std::string_view answer);

// A pre-split reference (pipeline records, service requests). The answer must
// be non-blank for the result to count as well-formed.
ParsedResponse make_reference(std::string_view reasoning, std::string_view answer,
                              std::string_view language);

}  // namespace pivotrl
