// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/parsing.hpp"

#include "pivotrl/text.hpp"

namespace pivotrl {
namespace {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t count = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

std::size_t skip_space(std::string_view s, std::size_t pos) {
    while (pos < s.size() && text::is_space(s[pos])) ++pos;
    return pos;
}

ParsedResponse malformed(const RawResponse& raw) {
    ParsedResponse out;
    out.language = raw.language;
    return out;
}

}  // namespace

ParsedResponse parse_response(const RawResponse& raw) {
    const std::string_view s = raw.text;
    for (auto tag : {kThinkOpen, kThinkClose, kAnswerOpen, kAnswerClose}) {
        if (count_occurrences(s, tag) != 1) return malformed(raw);
    }

    std::size_t pos = skip_space(s, 0);
    if (s.substr(pos, kThinkOpen.size()) != kThinkOpen) return malformed(raw);
    const std::size_t think_begin = pos + kThinkOpen.size();
    const std::size_t think_end = s.find(kThinkClose, think_begin);
    if (think_end == std::string_view::npos) return malformed(raw);

    pos = skip_space(s, think_end + kThinkClose.size());
    if (s.substr(pos, kAnswerOpen.size()) != kAnswerOpen) return malformed(raw);
    const std::size_t answer_begin = pos + kAnswerOpen.size();
    const std::size_t answer_end = s.find(kAnswerClose, answer_begin);
    if (answer_end == std::string_view::npos) return malformed(raw);

    if (skip_space(s, answer_end + kAnswerClose.size()) != s.size()) return malformed(raw);

    const auto answer = text::trim(s.substr(answer_begin, answer_end - answer_begin));
    if (answer.empty()) return malformed(raw);

    ParsedResponse out;
    out.reasoning = std::string(text::trim(s.substr(think_begin, think_end - think_begin)));
    out.answer = std::string(answer);
    out.well_formed = true;
    out.language = raw.language;
    return out;
}

int format_reward(const ParsedResponse& parsed) noexcept { return parsed.well_formed ? 1 : 0; }

std::string render_response(std::string_view reasoning, std::string_view answer) {
    std::string out;
    out.reserve(reasoning.size() + answer.size() + 40);
    out += kThinkOpen;
    out += reasoning;
    out += kThinkClose;
    out += kAnswerOpen;
    out += answer;
    out += kAnswerClose;
    return out;
}

ParsedResponse make_reference(std::string_view reasoning, std::string_view answer,
                              std::string_view language) {
    ParsedResponse out;
    out.language = std::string(language);
    const auto trimmed_answer = text::trim(answer);
    if (trimmed_answer.empty()) return out;
    out.reasoning = std::string(text::trim(reasoning));
    out.answer = std::string(trimmed_answer);
    out.well_formed = true;
    return out;
}

}  // namespace pivotrl
