// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pivotrl {

enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    ZeroNormVector,
    ProviderUnavailable,
    DimensionDrift,
    UnknownLanguage,
    RecordRejected,
    InvalidReference,
    NonFiniteReward,
    NonFiniteLoss,
    IoFailure,
    SchemaViolation,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (batch
// scorers, the HTTP service, the CLI) can map it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

    ErrorKind kind() const noexcept { return kind_; }
    // The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace pivotrl
