// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pivotrl::text {

// ASCII whitespace only: space, \t, \n, \v, \f, \r.
constexpr bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

std::string_view trim(std::string_view s) noexcept;
bool is_blank(std::string_view s) noexcept;
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");
std::string to_lower(std::string_view s);

}  // namespace pivotrl::text
