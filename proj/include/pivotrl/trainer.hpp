// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "pivotrl/backends.hpp"
#include "pivotrl/grpo.hpp"
#include "pivotrl/reward.hpp"
#include "pivotrl/synthlang.hpp"

namespace pivotrl {

// Initial policy as a stand-in for a pretrained model: fluent in the pivot,
// weak in the other languages, and mostly able to follow the tag format.
// Each position starts at
//   (1 - noise) * (c * onehot(target) + (1 - c) * uniform(same kind)) + noise * uniform(all)
// where c is the format competence at tag positions and the language's
// content competence elsewhere.
struct PolicyPrior {
    double pivot_competence = 0.9;
    double target_competence = 0.05;
    double format_competence = 0.97;
    double noise = 0.02;
};

// Which deterministic embedder scores the toy task. Plain bag-of-words gives
// every non-pivot text r_embed ~ 0 whatever its content, a gap no policy can
// close; the aligned variant behaves like a multilingual embedding model.
enum class ToyEmbedder { BagOfWords, Aligned };

struct ToyTaskConfig {
    int languages = 4;  // non-pivot languages; 0 trains the pivot alone
    Difficulty difficulty{1, 2};
    int prompts_per_language = 4;
    std::uint64_t task_seed = 7;
    std::string pivot = std::string(kDefaultPivot);
    PolicyPrior prior;
    ToyEmbedder embedder = ToyEmbedder::Aligned;

    void validate() const;
};

// Languages, prompts and the token space shared by every toy policy. Policy
// token v < |vocab| is pivot-vocabulary token v rendered in the sampling
// language; the last four ids are the tags.
class ToyEnvironment {
public:
    explicit ToyEnvironment(ToyTaskConfig config);

    const ToyTaskConfig& config() const noexcept { return config_; }
    // Pivot first, then "l1".."lK".
    const std::vector<SyntheticLanguage>& languages() const noexcept { return languages_; }
    const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }
    const std::vector<std::shared_ptr<const SyntheticTaskInstance>>& prompts(std::size_t language) const {
        return prompts_.at(language);
    }

    std::size_t vocab_size() const noexcept { return vocab_.size() + 4; }
    std::size_t length() const noexcept { return length_; }
    bool is_tag(std::size_t token) const noexcept { return token >= vocab_.size(); }

    std::vector<int> canonical_tokens(const SyntheticTaskInstance& instance) const;
    std::string render(const std::vector<int>& tokens, const SyntheticLanguage& language) const;
    ToyPolicy initial_policy(std::size_t language, std::size_t prompt) const;

    // Embedder per config.embedder + Dictionary + TokenF1 + oracle generator over these languages.
    ProviderSet deterministic_providers() const;

private:
    ToyTaskConfig config_;
    std::vector<std::string> vocab_;
    std::vector<SyntheticLanguage> languages_;
    std::vector<std::vector<std::shared_ptr<const SyntheticTaskInstance>>> prompts_;
    std::size_t length_ = 0;
};

struct IterationStats {
    int iteration = 0;
    std::map<std::string, double> mean_reward;
    std::map<std::string, double> oracle_accuracy;  // share of samples with a correct answer
    double loss = 0.0;
    double kl = 0.0;

    bool operator==(const IterationStats&) const = default;
};

using TrainingHistory = std::vector<IterationStats>;

void to_json(nlohmann::json& j, const IterationStats& s);
void from_json(const nlohmann::json& j, IterationStats& s);

std::string history_to_jsonl(const TrainingHistory& history);
void write_history(const TrainingHistory& history, const std::filesystem::path& path);
TrainingHistory read_history(const std::filesystem::path& path);

class ToyTrainer {
public:
    // Empty providers select the environment's deterministic backends.
    ToyTrainer(TrainerConfig config, ToyTaskConfig task, RewardConfig reward, ProviderSet providers = {});

    const ToyEnvironment& environment() const noexcept { return env_; }
    const TrainerConfig& config() const noexcept { return config_; }
    const RewardEngine& engine() const noexcept { return engine_; }
    const std::vector<ToyPolicy>& policies() const noexcept { return policies_; }
    const std::vector<ToyPolicy>& reference_policies() const noexcept { return reference_; }

    // Runs `iterations` update steps. Entry i of the result describes the
    // policy after i steps, so the history has iterations + 1 entries and
    // entry 0 is the untrained policy.
    TrainingHistory train(int iterations);

    // Fresh samples (one group per prompt) scored under `reward`, with an
    // RNG stream disjoint from training.
    IterationStats evaluate(const RewardConfig& reward, std::uint64_t stream = 0) const;

private:
    struct Scored {
        RolloutGroup group;
        std::vector<double> oracle;
    };

    std::size_t table(std::size_t language, std::size_t prompt) const;
    Scored rollout(std::size_t language, std::size_t prompt, const RewardConfig& reward,
                   std::uint64_t call_index) const;
    IterationStats summarize(int iteration, const std::vector<std::vector<Scored>>& by_language) const;

    TrainerConfig config_;
    ToyEnvironment env_;
    RewardConfig reward_;
    RewardEngine engine_;
    std::vector<ToyPolicy> policies_;
    std::vector<ToyPolicy> reference_;
    std::vector<Optimizer> optimizers_;
    int completed_ = 0;
};

}  // namespace pivotrl
