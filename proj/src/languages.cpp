// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/languages.hpp"

#include <array>
#include <utility>

#include "pivotrl/error.hpp"
#include "pivotrl/text.hpp"

namespace pivotrl {
namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 9> kLanguageNames{{
    {"en", "English"},
    {"es", "Spanish"},
    {"fr", "French"},
    {"pt-pt", "Portuguese (Portugal)"},
    {"ru", "Russian"},
    {"pl", "Polish"},
    {"hi", "Hindi"},
    {"zh", "Chinese"},
    {"ko", "Korean"},
}};

}  // namespace

std::optional<std::string_view> language_name(std::string_view code) {
    const std::string key = text::to_lower(code);
    for (const auto& [c, name] : kLanguageNames) {
        if (c == key) return name;
    }
    return std::nullopt;
}

std::string translation_prompt(std::string_view text, std::string_view target_code) {
    const auto name = language_name(target_code);
    if (!name) throw Error(ErrorKind::UnknownLanguage, "no display name for '" + std::string(target_code) + "'");
    std::string out = "Translate the following English source text to ";
    out += *name;
    out += ":\nEnglish: ";
    out += text;
    out += " \n";
    out += *name;
    out += ": ";
    return out;
}

}  // namespace pivotrl
