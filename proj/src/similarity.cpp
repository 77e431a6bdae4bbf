// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pivotrl/error.hpp"

namespace pivotrl {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error(ErrorKind::InvalidArgument, "embedding must have dim >= 1");
    for (double x : values_) {
        if (!std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "embedding has non-finite value");
    }
}

double dot(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dim() != v.dim()) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::to_string(u.dim()) + " vs " + std::to_string(v.dim()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) acc += u[i] * v[i];
    return acc;
}

double l2_norm(const EmbeddingVector& v) {
    double acc = 0.0;
    for (double x : v.values()) acc += x * x;
    return std::sqrt(acc);
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
    const double num = dot(u, v);
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0) throw Error(ErrorKind::ZeroNormVector, "cosine of a zero vector");
    // Multiplying the norms (rather than dividing twice) keeps the result
    // symmetric in (u, v) bit for bit.
    const double c = num / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

}  // namespace pivotrl
