// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pivotrl/grpo.hpp"
#include "pivotrl/reward.hpp"
#include "pivotrl/trainer.hpp"

namespace pivotrl {

struct AblationOptions {
    std::vector<std::string> modes;  // preset names; empty means all, in table order
    int seeds = 5;
    int iterations = 500;
    int eval_rounds = 4;  // evaluation groups per prompt after training
    TrainerConfig trainer;
    ToyTaskConfig task;
    bool include_baseline = true;  // an untrained row for reference
    int workers = 1;
};

struct AblationRow {
    std::string mode;  // preset name, or "untrained"
    std::string answer_label;
    std::string reasoning_label;
    RoutingTrace routing;
    // Per seed: mean reward under the mode's own reward at the last iteration,
    // then reward, accuracy and reward gap of fresh samples scored with the
    // full reward, so rows are comparable.
    std::vector<double> train_reward;
    std::vector<double> full_reward;
    std::vector<double> accuracy;
    std::vector<double> full_gap;
};

struct AblationResult {
    std::vector<AblationRow> rows;
};

// Names resolved against the preset table; "all" expands to every preset.
// Throws InvalidArgument on an unknown name.
std::vector<std::string> resolve_modes(const std::vector<std::string>& names);

// Provider steps one preset takes on a fixed well-formed non-pivot pair.
RoutingTrace mode_trace(std::string_view mode);

AblationResult run_ablation(const AblationOptions& options);

double mean(const std::vector<double>& xs);

// One row per mode. Columns: mode,answer_part,reasoning_part,routing,seeds,
// train_reward_mean,full_reward_mean,accuracy_mean,full_gap_mean, then
// full_reward_seed<i> and accuracy_seed<i> for each seed.
std::string ablation_csv(const AblationResult& result);

}  // namespace pivotrl
