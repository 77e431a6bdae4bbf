// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/ablation.hpp"

#include <iomanip>
#include <numeric>
#include <sstream>

#include "pivotrl/error.hpp"
#include "pivotrl/parallel.hpp"

namespace pivotrl {

namespace {

constexpr std::string_view kUntrained = "untrained";

double language_mean(const std::map<std::string, double>& values) {
    double sum = 0.0;
    for (const auto& [_, v] : values) sum += v;
    return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

double reward_gap(const std::map<std::string, double>& values, const std::string& pivot) {
    double sum = 0.0;
    double n = 0.0;
    for (const auto& [code, v] : values) {
        if (code == pivot) continue;
        sum += v;
        n += 1.0;
    }
    return n == 0.0 ? 0.0 : values.at(pivot) - sum / n;
}

IterationStats averaged_evaluation(const ToyTrainer& trainer, const RewardConfig& reward, int rounds) {
    IterationStats total;
    for (int r = 0; r < rounds; ++r) {
        const auto s = trainer.evaluate(reward, static_cast<std::uint64_t>(r));
        for (const auto& [k, v] : s.mean_reward) total.mean_reward[k] += v / rounds;
        for (const auto& [k, v] : s.oracle_accuracy) total.oracle_accuracy[k] += v / rounds;
    }
    return total;
}

std::string join_trace(const RoutingTrace& trace) {
    std::string out;
    for (const auto& step : trace) {
        if (!out.empty()) out += '|';
        out += step;
    }
    return out;
}

}  // namespace

double mean(const std::vector<double>& xs) {
    return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::vector<std::string> resolve_modes(const std::vector<std::string>& names) {
    std::vector<std::string> out;
    auto add_all = [&] {
        for (const auto& p : kRewardPresets) out.emplace_back(p.name);
    };
    if (names.empty()) {
        add_all();
        return out;
    }
    for (const auto& n : names) {
        if (n == "all") {
            add_all();
        } else if (find_preset(n) != nullptr) {
            out.push_back(n);
        } else {
            throw Error(ErrorKind::InvalidArgument, "unknown reward mode '" + n + "'");
        }
    }
    return out;
}

RoutingTrace mode_trace(std::string_view mode) {
    ToyTaskConfig task;
    task.languages = 1;
    task.prompts_per_language = 1;
    const ToyEnvironment env(task);
    const auto& instance = *env.prompts(1).front();
    const RewardEngine engine(env.deterministic_providers());
    const auto pred = parse_response(RawResponse{render_target_response(instance), instance.target_language});
    RoutingTrace trace;
    engine.score(pred, instance.pivot_reference, preset_config(mode, task.pivot), &trace);
    return trace;
}

AblationResult run_ablation(const AblationOptions& options) {
    if (options.seeds < 1) throw Error(ErrorKind::InvalidArgument, "seeds must be >= 1");
    if (options.iterations < 0) throw Error(ErrorKind::InvalidArgument, "iterations must be >= 0");
    if (options.eval_rounds < 1) throw Error(ErrorKind::InvalidArgument, "eval_rounds must be >= 1");

    std::vector<std::string> modes;
    if (options.include_baseline) modes.emplace_back(kUntrained);
    for (auto& m : resolve_modes(options.modes)) modes.push_back(std::move(m));

    const auto seeds = static_cast<std::size_t>(options.seeds);
    const auto full = preset_config(kFullPreset, options.task.pivot);
    AblationResult result;
    result.rows.resize(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
        auto& row = result.rows[m];
        row.mode = modes[m];
        if (row.mode == kUntrained) {
            row.answer_label = "-";
            row.reasoning_label = "-";
        } else {
            const auto* preset = find_preset(row.mode);
            row.answer_label = preset->answer_label;
            row.reasoning_label = preset->reasoning_label;
            row.routing = mode_trace(row.mode);
        }
        row.train_reward.resize(seeds);
        row.full_reward.resize(seeds);
        row.accuracy.resize(seeds);
        row.full_gap.resize(seeds);
    }

    parallel_for(modes.size() * seeds, options.workers, [&](std::size_t job) {
        auto& row = result.rows[job / seeds];
        const std::size_t s = job % seeds;
        TrainerConfig cfg = options.trainer;
        cfg.seed = options.trainer.seed + s;
        ToyTaskConfig task = options.task;
        task.task_seed = options.task.task_seed + s;
        const bool untrained = row.mode == kUntrained;
        ToyTrainer trainer(cfg, task, untrained ? full : preset_config(row.mode, task.pivot));
        const auto history = trainer.train(untrained ? 0 : options.iterations);
        const auto eval = averaged_evaluation(trainer, full, options.eval_rounds);
        row.train_reward[s] = language_mean(history.back().mean_reward);
        row.full_reward[s] = language_mean(eval.mean_reward);
        row.accuracy[s] = language_mean(eval.oracle_accuracy);
        row.full_gap[s] = reward_gap(eval.mean_reward, task.pivot);
    });
    return result;
}

std::string ablation_csv(const AblationResult& result) {
    std::ostringstream out;
    const std::size_t seeds = result.rows.empty() ? 0 : result.rows.front().full_reward.size();
    out << "mode,answer_part,reasoning_part,routing,seeds,train_reward_mean,full_reward_mean,accuracy_mean,full_gap_mean";
    for (std::size_t s = 0; s < seeds; ++s) out << ",full_reward_seed" << s;
    for (std::size_t s = 0; s < seeds; ++s) out << ",accuracy_seed" << s;
    out << '\n' << std::fixed << std::setprecision(6);
    for (const auto& row : result.rows) {
        out << row.mode << ',' << row.answer_label << ',' << row.reasoning_label << ',' << join_trace(row.routing) << ','
            << seeds << ',' << mean(row.train_reward) << ',' << mean(row.full_reward) << ',' << mean(row.accuracy) << ','
            << mean(row.full_gap);
        for (double x : row.full_reward) out << ',' << x;
        for (double x : row.accuracy) out << ',' << x;
        out << '\n';
    }
    return out.str();
}

}  // namespace pivotrl
