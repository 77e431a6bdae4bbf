// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pivotrl/error.hpp"
#include "pivotrl/random.hpp"

namespace pivotrl {

void TrainerConfig::validate() const {
    if (group_size < 2) throw Error(ErrorKind::InvalidArgument, "group_size must be >= 2");
    if (!(temperature > 0.0)) throw Error(ErrorKind::InvalidArgument, "temperature must be > 0");
    if (!(clip_epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "clip_epsilon must be > 0");
    if (!(kl_coefficient >= 0.0)) throw Error(ErrorKind::InvalidArgument, "kl_coefficient must be >= 0");
    if (!(learning_rate >= 0.0)) throw Error(ErrorKind::InvalidArgument, "learning_rate must be >= 0");
    if (gamma != 1.0 || gae_lambda != 1.0) {
        throw Error(ErrorKind::InvalidArgument, "only gamma = lambda = 1 is supported (critic-free GRPO)");
    }
    if (episodes < 1) throw Error(ErrorKind::InvalidArgument, "episodes must be >= 1");
    if (max_epochs < 1) throw Error(ErrorKind::InvalidArgument, "max_epochs must be >= 1");
    if (rollout_batch < 1) throw Error(ErrorKind::InvalidArgument, "rollout_batch must be >= 1");
}

ToyPolicy::ToyPolicy(std::size_t length, std::size_t vocab)
    : ToyPolicy(length, vocab, std::vector<double>(length * vocab, 0.0)) {}

ToyPolicy::ToyPolicy(std::size_t length, std::size_t vocab, std::vector<double> logits)
    : length_(length), vocab_(vocab), logits_(std::move(logits)) {
    if (length_ == 0 || vocab_ == 0) throw Error(ErrorKind::InvalidArgument, "policy needs L >= 1 and V >= 1");
    if (logits_.size() != length_ * vocab_) throw Error(ErrorKind::InvalidArgument, "logit table has wrong size");
    for (double z : logits_) {
        if (!std::isfinite(z)) throw Error(ErrorKind::InvalidArgument, "policy logits must be finite");
    }
}

std::vector<double> ToyPolicy::log_probs(double temperature) const {
    std::vector<double> out(logits_.size());
    for (std::size_t p = 0; p < length_; ++p) {
        const double* row = logits_.data() + p * vocab_;
        double* dst = out.data() + p * vocab_;
        double hi = row[0] / temperature;
        for (std::size_t v = 1; v < vocab_; ++v) hi = std::max(hi, row[v] / temperature);
        double z = 0.0;
        for (std::size_t v = 0; v < vocab_; ++v) z += std::exp(row[v] / temperature - hi);
        const double log_z = hi + std::log(z);
        for (std::size_t v = 0; v < vocab_; ++v) dst[v] = row[v] / temperature - log_z;
    }
    return out;
}

double ToyPolicy::sequence_log_prob(std::span<const int> tokens, double temperature) const {
    if (tokens.size() != length_) throw Error(ErrorKind::InvalidArgument, "sequence length does not match policy");
    const auto lp = log_probs(temperature);
    double total = 0.0;
    for (std::size_t p = 0; p < length_; ++p) total += lp[p * vocab_ + static_cast<std::size_t>(tokens[p])];
    return total;
}

RolloutGroup sample_group(const ToyPolicy& policy, std::shared_ptr<const SyntheticTaskInstance> instance,
                          const TrainerConfig& config, std::uint64_t call_index) {
    if (config.group_size < 2) throw Error(ErrorKind::InvalidArgument, "group_size must be >= 2");
    const std::size_t L = policy.length();
    const std::size_t V = policy.vocab();
    const auto lp = policy.log_probs(config.temperature);
    std::vector<double> probs(lp.size());
    std::transform(lp.begin(), lp.end(), probs.begin(), [](double x) { return std::exp(x); });

    Rng rng(mix_seed(config.seed, call_index));
    RolloutGroup group;
    group.prompt = std::move(instance);
    group.responses.resize(static_cast<std::size_t>(config.group_size));
    for (auto& r : group.responses) {
        r.tokens.resize(L);
        r.token_log_probs.resize(L);
        for (std::size_t p = 0; p < L; ++p) {
            const double u = uniform01(rng);
            double acc = 0.0;
            std::size_t chosen = V - 1;
            for (std::size_t v = 0; v < V; ++v) {
                acc += probs[p * V + v];
                if (u < acc) {
                    chosen = v;
                    break;
                }
            }
            // Rounding can leave acc slightly below 1; never pick a zero-mass tail token.
            while (chosen > 0 && probs[p * V + chosen] == 0.0) --chosen;
            r.tokens[p] = static_cast<int>(chosen);
            r.token_log_probs[p] = lp[p * V + chosen];
            r.log_prob += r.token_log_probs[p];
        }
    }
    return group;
}

std::vector<double> compute_advantages(std::span<const double> rewards) {
    if (rewards.size() < 2) throw Error(ErrorKind::InvalidArgument, "a group needs at least two rewards");
    // Neumaier-compensated sum keeps the centered values summing to ~0.
    double sum = 0.0;
    double comp = 0.0;
    for (double r : rewards) {
        if (!std::isfinite(r)) throw Error(ErrorKind::NonFiniteReward, "reward is not finite");
        const double t = sum + r;
        comp += std::abs(sum) >= std::abs(r) ? (sum - t) + r : (r - t) + sum;
        sum = t;
    }
    double mean = (sum + comp) / static_cast<double>(rewards.size());
    // One refinement pass removes the rounding left by the division, so equal
    // rewards give exactly zero advantages.
    double residual = 0.0;
    for (double r : rewards) residual += r - mean;
    mean += residual / static_cast<double>(rewards.size());
    std::vector<double> out(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = rewards[i] - mean;
    return out;
}

double mean_kl(const ToyPolicy& p, const ToyPolicy& q, double temperature) {
    if (p.length() != q.length() || p.vocab() != q.vocab()) {
        throw Error(ErrorKind::InvalidArgument, "KL between policies of different shapes");
    }
    const auto lp = p.log_probs(temperature);
    const auto lq = q.log_probs(temperature);
    double total = 0.0;
    for (std::size_t i = 0; i < lp.size(); ++i) total += std::exp(lp[i]) * (lp[i] - lq[i]);
    return total / static_cast<double>(p.length());
}

LossResult ppo_clip_loss(const RolloutGroup& group, const ToyPolicy& new_policy, const ToyPolicy& ref_policy,
                         const TrainerConfig& config) {
    const std::size_t G = group.responses.size();
    const std::size_t L = new_policy.length();
    const std::size_t V = new_policy.vocab();
    if (G < 2 || group.advantages.size() != G) {
        throw Error(ErrorKind::InvalidArgument, "group needs >= 2 responses with advantages filled");
    }
    if (ref_policy.length() != L || ref_policy.vocab() != V) {
        throw Error(ErrorKind::InvalidArgument, "reference policy shape mismatch");
    }
    const double T = config.temperature;
    const double eps = config.clip_epsilon;
    const auto lp_new = new_policy.log_probs(T);
    const auto lp_ref = ref_policy.log_probs(T);

    LossResult out;
    out.gradient.assign(L * V, 0.0);

    // Surrogate. d rho / d z[p][v] = rho * (1[v = y_p] - pi[p][v]) / T.
    std::vector<double> weight_per_position(L, 0.0);
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < G; ++i) {
        const auto& r = group.responses[i];
        if (r.tokens.size() != L) throw Error(ErrorKind::InvalidArgument, "rollout length mismatch");
        double logp_new = 0.0;
        for (std::size_t p = 0; p < L; ++p) logp_new += lp_new[p * V + static_cast<std::size_t>(r.tokens[p])];
        const double rho = std::exp(logp_new - r.log_prob);
        const double adv = group.advantages[i];
        const double unclipped = rho * adv;
        const double clipped_term = std::clamp(rho, 1.0 - eps, 1.0 + eps) * adv;
        // Ties (rho inside the trust region) take the unclipped branch.
        const bool unclipped_active = unclipped <= clipped_term;
        out.surrogate += std::min(unclipped, clipped_term);
        if (!unclipped_active) {
            ++clipped;
            continue;
        }
        const double w = -adv * rho / (static_cast<double>(G) * T);
        for (std::size_t p = 0; p < L; ++p) {
            out.gradient[p * V + static_cast<std::size_t>(r.tokens[p])] += w;
            weight_per_position[p] += w;
        }
    }
    out.surrogate /= static_cast<double>(G);
    out.clip_fraction = static_cast<double>(clipped) / static_cast<double>(G);
    for (std::size_t p = 0; p < L; ++p) {
        if (weight_per_position[p] == 0.0) continue;
        for (std::size_t v = 0; v < V; ++v) out.gradient[p * V + v] -= weight_per_position[p] * std::exp(lp_new[p * V + v]);
    }

    // KL(new || ref) per position; d KL_p / d z_k = pi_k (log pi_k - log q_k - KL_p) / T.
    const double beta = config.kl_coefficient;
    double kl_total = 0.0;
    for (std::size_t p = 0; p < L; ++p) {
        double kl_p = 0.0;
        for (std::size_t v = 0; v < V; ++v) {
            const std::size_t k = p * V + v;
            kl_p += std::exp(lp_new[k]) * (lp_new[k] - lp_ref[k]);
        }
        kl_total += kl_p;
        if (beta == 0.0) continue;
        const double scale = beta / (static_cast<double>(L) * T);
        for (std::size_t v = 0; v < V; ++v) {
            const std::size_t k = p * V + v;
            out.gradient[k] += scale * std::exp(lp_new[k]) * (lp_new[k] - lp_ref[k] - kl_p);
        }
    }
    out.kl = kl_total / static_cast<double>(L);
    out.loss = -out.surrogate + beta * out.kl;
    return out;
}

Optimizer::Optimizer(OptimizerKind kind, std::size_t size, double learning_rate)
    : kind_(kind), learning_rate_(learning_rate) {
    if (kind_ == OptimizerKind::Adam) {
        m_.assign(size, 0.0);
        v_.assign(size, 0.0);
    }
}

void Optimizer::step(ToyPolicy& policy, std::span<const double> gradient) {
    auto z = policy.logits();
    if (gradient.size() != z.size()) throw Error(ErrorKind::InvalidArgument, "gradient shape mismatch");
    if (learning_rate_ == 0.0) return;
    if (kind_ == OptimizerKind::Sgd) {
        for (std::size_t i = 0; i < z.size(); ++i) z[i] -= learning_rate_ * gradient[i];
        return;
    }
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < z.size(); ++i) {
        m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * gradient[i];
        v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * gradient[i] * gradient[i];
        z[i] -= learning_rate_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
}

}  // namespace pivotrl
