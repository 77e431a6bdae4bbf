// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pivotrl {

// Display name for the eight training languages plus English. Codes are
// matched case-insensitively ("pt-PT" == "pt-pt"); unknown codes give nullopt.
std::optional<std::string_view> language_name(std::string_view code);

// The chat prompt sent to remote translation models:
//
//   Translate the following English source text to <Target>:\nEnglish: <TEXT> \n<Target>: 
//
// The wording is fixed; only the target name and the text vary. Throws
// UnknownLanguage for codes without a display name.
std::string translation_prompt(std::string_view text, std::string_view target_code);

}  // namespace pivotrl
