// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pivotrl {

// A dense embedding. Construction rejects empty or non-finite input, so every
// live instance satisfies dim() >= 1 and all-finite values.
class EmbeddingVector {
public:
    explicit EmbeddingVector(std::vector<double> values);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<double> values_;
};

double dot(const EmbeddingVector& u, const EmbeddingVector& v);
double l2_norm(const EmbeddingVector& v);

// <u,v> / (|u||v|), accumulated in double. Throws DimensionMismatch or
// ZeroNormVector; a zero embedding means a broken backend, not "unrelated".
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

}  // namespace pivotrl
