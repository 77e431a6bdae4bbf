// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/text.hpp"

#include "pivotrl/error.hpp"

namespace pivotrl {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ZeroNormVector: return "ZeroNormVector";
        case ErrorKind::ProviderUnavailable: return "ProviderUnavailable";
        case ErrorKind::DimensionDrift: return "DimensionDrift";
        case ErrorKind::UnknownLanguage: return "UnknownLanguage";
        case ErrorKind::RecordRejected: return "RecordRejected";
        case ErrorKind::InvalidReference: return "InvalidReference";
        case ErrorKind::NonFiniteReward: return "NonFiniteReward";
        case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::SchemaViolation: return "SchemaViolation";
    }
    return "Unknown";
}

namespace text {

std::string_view trim(std::string_view s) noexcept {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && is_space(s[begin])) ++begin;
    while (end > begin && is_space(s[end - 1])) --end;
    return s.substr(begin, end - begin);
}

bool is_blank(std::string_view s) noexcept { return trim(s).empty(); }

std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += sep;
        out += tokens[i];
    }
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace text
}  // namespace pivotrl
