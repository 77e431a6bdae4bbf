// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pivotrl/synthlang.hpp"

namespace pivotrl {

enum class OptimizerKind { Sgd, Adam };

struct TrainerConfig {
    int group_size = 8;
    double temperature = 1.0;
    double clip_epsilon = 0.2;
    double kl_coefficient = 1e-2;
    double learning_rate = 1e-2;
    // Terminal-only rewards with gamma = lambda = 1 make every token's
    // advantage the group-centered sequence reward; no critic is involved.
    double gamma = 1.0;
    double gae_lambda = 1.0;
    int episodes = 2;
    int max_epochs = 1;   // gradient passes over each batch of rollouts
    int rollout_batch = 4;  // prompts per language per iteration
    std::uint64_t seed = 0;
    OptimizerKind optimizer = OptimizerKind::Adam;

    void validate() const;
};

// Per-position independent categorical policy: position p draws a token from
// softmax(logits[p] / temperature).
class ToyPolicy {
public:
    ToyPolicy(std::size_t length, std::size_t vocab);
    ToyPolicy(std::size_t length, std::size_t vocab, std::vector<double> logits);

    std::size_t length() const noexcept { return length_; }
    std::size_t vocab() const noexcept { return vocab_; }

    double logit(std::size_t position, std::size_t token) const { return logits_[position * vocab_ + token]; }
    double& logit(std::size_t position, std::size_t token) { return logits_[position * vocab_ + token]; }
    std::span<const double> logits() const noexcept { return logits_; }
    std::span<double> logits() noexcept { return logits_; }

    // log softmax(logits[p] / temperature), for every position, row-major.
    std::vector<double> log_probs(double temperature) const;
    double sequence_log_prob(std::span<const int> tokens, double temperature) const;

    bool operator==(const ToyPolicy&) const = default;

private:
    std::size_t length_;
    std::size_t vocab_;
    std::vector<double> logits_;
};

struct Rollout {
    std::vector<int> tokens;
    std::vector<double> token_log_probs;  // under the sampling policy
    double log_prob = 0.0;                // sum of token_log_probs
};

struct RolloutGroup {
    std::shared_ptr<const SyntheticTaskInstance> prompt;
    std::vector<Rollout> responses;
    std::vector<double> rewards;
    std::vector<double> advantages;
};

// Draws config.group_size sequences. The RNG stream is derived from
// (config.seed, call_index) only, so a call is reproducible in isolation.
RolloutGroup sample_group(const ToyPolicy& policy, std::shared_ptr<const SyntheticTaskInstance> instance,
                          const TrainerConfig& config, std::uint64_t call_index);

// A_i = R_i - mean(R). Throws InvalidArgument for fewer than two rewards and
// NonFiniteReward for NaN/inf.
std::vector<double> compute_advantages(std::span<const double> rewards);

struct LossResult {
    double loss = 0.0;
    double surrogate = 0.0;  // mean clipped surrogate (before the sign flip)
    double kl = 0.0;         // KL(new || ref), averaged over positions
    double clip_fraction = 0.0;
    std::vector<double> gradient;  // d loss / d logits, same layout as ToyPolicy
};

// loss = -(1/G) sum_i min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i) + beta * KL(new || ref)
// with rho_i = exp(logp_new(y_i) - logp_old(y_i)), and its exact gradient.
LossResult ppo_clip_loss(const RolloutGroup& group, const ToyPolicy& new_policy, const ToyPolicy& ref_policy,
                         const TrainerConfig& config);

// Exact mean per-position categorical KL(p || q) at the given temperature.
double mean_kl(const ToyPolicy& p, const ToyPolicy& q, double temperature);

class Optimizer {
public:
    Optimizer(OptimizerKind kind, std::size_t size, double learning_rate);
    void step(ToyPolicy& policy, std::span<const double> gradient);

private:
    OptimizerKind kind_;
    double learning_rate_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::int64_t t_ = 0;
};

}  // namespace pivotrl
