// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <pthread.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "pivotrl/ablation.hpp"
#include "pivotrl/config.hpp"
#include "pivotrl/error.hpp"
#include "pivotrl/pipeline.hpp"
#include "pivotrl/random.hpp"
#include "pivotrl/report.hpp"
#include "pivotrl/service.hpp"
#include "pivotrl/trainer.hpp"

namespace pivotrl::cli {

namespace {

namespace fs = std::filesystem;

// Usage problems found after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::IoFailure:
        case ErrorKind::SchemaViolation:
        case ErrorKind::UnknownLanguage:
        case ErrorKind::InvalidReference: return kUsage;
        default: return kRuntime;
    }
}

AppConfig resolve_config(const std::string& path) {
    std::string chosen = path;
    if (chosen.empty()) chosen = system_env("PIVOTRL_CONFIG").value_or("");
    AppConfig config = chosen.empty() ? default_config() : load_config(chosen);
    apply_env_overrides(config);
    return config;
}

void write_text(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path + " for writing");
    f << content;
    f.close();
    if (!f) throw Error(ErrorKind::IoFailure, "write failed: " + path);
}

double non_pivot_mean(const std::map<std::string, double>& values, const std::string& pivot) {
    double sum = 0.0;
    double n = 0.0;
    for (const auto& [k, v] : values) {
        if (k == pivot) continue;
        sum += v;
        n += 1.0;
    }
    return n == 0.0 ? 0.0 : sum / n;
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
    std::string input;
    std::string mode;
    std::string config;
    std::string output = "-";
    int workers = 1;
};

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
    const auto config = resolve_config(a.config);
    const std::string mode = a.mode.empty() ? config.mode : a.mode;
    if (find_preset(mode) == nullptr) throw UsageError("unknown mode '" + mode + "'");
    auto shard = load(a.input, config.pivot);
    const auto runtime = build_providers(config);
    const RewardEngine engine(runtime.providers);
    try {
        shard = score_records(std::move(shard), engine, preset_config(mode, config.pivot), StageOptions{a.workers});
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidReference) throw;
        err << "provider failure while scoring: " << e.what() << '\n';
        return kRuntime;
    }
    write_text(a.output, shard_to_jsonl(shard), out);
    std::size_t scored = 0;
    for (const auto& r : shard) scored += r.status == RecordStatus::Scored ? 1 : 0;
    err << "scored " << scored << " of " << shard.size() << " records with mode " << mode << '\n';
    return kOk;
}

struct PipelineArgs {
    std::string input;
    std::vector<std::string> languages;
    std::string providers;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = 1;
};

int cmd_pipeline(const PipelineArgs& a, std::ostream& out, std::ostream& err) {
    AppConfig config = a.providers.empty() ? default_config() : load_config(a.providers);
    if (a.providers.empty()) {
        // Build a lexicon for exactly the requested non-pivot languages.
        std::vector<std::string> synthetic;
        for (const auto& l : a.languages) {
            if (l != config.pivot) synthetic.push_back(l);
        }
        if (!synthetic.empty()) config.synthetic.languages = synthetic;
    }
    apply_env_overrides(config);
    const auto runtime = build_providers(config);
    const auto input = load(a.input, config.pivot);
    const StageOptions options{a.workers};

    fs::create_directories(a.out_dir);
    const auto shards = partition(input, a.languages, a.seed);
    nlohmann::json summary{{"input", input.size()}, {"seed", a.seed}, {"shards", nlohmann::json::object()}};
    bool provider_down = false;
    for (std::size_t i = 0; i < shards.size(); ++i) {
        const auto& lang = a.languages[i];
        nlohmann::json stages = nlohmann::json::array();
        auto record_stage = [&](const char* name, const Shard& s) {
            stages.push_back({{"stage", name},
                              {"records", s.size()},
                              {"survivors", count_survivors(s)},
                              {"filtered_out", count_filtered(s)}});
        };
        Shard shard = shards[i];
        record_stage("partition", shard);
        shard = translate_prompts(std::move(shard), lang, *runtime.providers.translator, options);
        record_stage("translate", shard);
        shard = generate_references(std::move(shard), *runtime.providers.reference_generator, config.pivot, options);
        record_stage("reference", shard);
        shard = filter_ill_formed(std::move(shard));
        record_stage("filter", shard);
        for (const auto& r : shard) {
            if (r.filter_reason == kTranslationFailed || r.filter_reason == kReferenceFailed) provider_down = true;
        }
        persist(shard, fs::path(a.out_dir) / (lang + ".jsonl"));
        summary["shards"][lang] = {{"file", lang + ".jsonl"}, {"stages", stages}};
    }
    write_text((fs::path(a.out_dir) / "summary.json").string(), summary.dump(2) + "\n", out);
    if (provider_down) {
        err << "some records were dropped because a provider failed; see filter_reason in the shard files\n";
        return kRuntime;
    }
    return kOk;
}

struct TrainArgs {
    int languages = 4;
    int iterations = 500;
    int group_size = 8;
    std::uint64_t seed = 0;
    std::uint64_t task_seed = 7;
    std::string reward_mode = "full";
    std::string history;
    double learning_rate = 1e-2;
    double temperature = 1.0;
    double kl = 1e-2;
    double clip = 0.2;
    int max_epochs = 1;
    int prompts = 4;
    std::string embedder = "aligned_bow";
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream&) {
    if (find_preset(a.reward_mode) == nullptr) throw UsageError("unknown reward mode '" + a.reward_mode + "'");
    TrainerConfig cfg;
    cfg.group_size = a.group_size;
    cfg.seed = a.seed;
    cfg.learning_rate = a.learning_rate;
    cfg.temperature = a.temperature;
    cfg.kl_coefficient = a.kl;
    cfg.clip_epsilon = a.clip;
    cfg.max_epochs = a.max_epochs;
    ToyTaskConfig task;
    task.languages = a.languages;
    task.task_seed = a.task_seed;
    task.prompts_per_language = a.prompts;
    task.embedder = a.embedder == "bow" ? ToyEmbedder::BagOfWords : ToyEmbedder::Aligned;
    ToyTrainer trainer(cfg, task, preset_config(a.reward_mode, task.pivot));
    const auto history = trainer.train(a.iterations);
    if (!a.history.empty()) write_history(history, a.history);

    const auto& first = history.front();
    const auto& last = history.back();
    out << "iterations " << a.iterations << ", reward mode " << a.reward_mode << '\n';
    for (const auto& [code, r] : last.mean_reward) {
        out << "  " << code << ": reward " << first.mean_reward.at(code) << " -> " << r << ", accuracy "
            << first.oracle_accuracy.at(code) << " -> " << last.oracle_accuracy.at(code) << '\n';
    }
    if (a.languages > 0) {
        const double g0 = first.mean_reward.at(task.pivot) - non_pivot_mean(first.mean_reward, task.pivot);
        const double g1 = last.mean_reward.at(task.pivot) - non_pivot_mean(last.mean_reward, task.pivot);
        out << "  reward gap " << g0 << " -> " << g1 << '\n';
    }
    return kOk;
}

struct AblateArgs {
    std::vector<std::string> modes{"all"};
    int seeds = 5;
    int iterations = 500;
    std::string out;
    int workers = 0;
};

int cmd_ablate(const AblateArgs& a, std::ostream& out, std::ostream& err) {
    AblationOptions options;
    try {
        options.modes = resolve_modes(a.modes);
    } catch (const Error& e) {
        throw UsageError(e.detail());
    }
    options.seeds = a.seeds;
    options.iterations = a.iterations;
    options.workers = a.workers > 0 ? a.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto result = run_ablation(options);
    write_text(a.out, ablation_csv(result), out);
    for (const auto& row : result.rows) {
        err << row.mode << ": full-reward " << mean(row.full_reward) << ", accuracy " << mean(row.accuracy) << '\n';
    }
    return kOk;
}

struct ReportArgs {
    std::string history;
    std::string baseline;
    std::string format = "table";
    std::string pivot = std::string(kDefaultPivot);
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream&) {
    const auto history = read_history(a.history);
    std::optional<TrainingHistory> baseline;
    if (!a.baseline.empty()) baseline = read_history(a.baseline);
    const auto report = make_gap_report(history, baseline ? &*baseline : nullptr, a.pivot);
    out << (a.format == "csv" ? gap_report_csv(report) : gap_report_table(report));
    return kOk;
}

struct ServeArgs {
    std::string config;
    std::string host;
    int port = -1;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream&) {
    auto config = resolve_config(a.config);
    if (!a.host.empty()) config.service.host = a.host;
    if (a.port >= 0) config.service.port = a.port;
    auto runtime = build_providers(config);
    ScoringService service(config, std::move(runtime));

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::thread([&service, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        service.stop();
    }).detach();

    const int port = service.bind(config.service.host, config.service.port);
    out << "listening on " << config.service.host << ':' << port << std::endl;
    service.listen();
    return kOk;
}

struct SynthArgs {
    int count = 400;
    std::uint64_t seed = 0;
    int digits = 1;
    int terms = 2;
    std::vector<std::string> languages;  // when set, emit a scoring fixture
    std::uint64_t lexicon_seed = 7;
    std::string output = "-";
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
    if (a.count < 0) throw UsageError("--count must be >= 0");
    const Difficulty difficulty{a.digits, a.terms};
    const auto vocab = pivot_vocabulary(difficulty);
    const auto pivot = SyntheticLanguage::pivot(vocab);
    std::vector<SyntheticLanguage> languages;
    if (!a.languages.empty()) languages = make_languages(a.lexicon_seed, a.languages, vocab);

    Shard shard;
    for (int i = 0; i < a.count; ++i) {
        const auto seed = mix_seed(a.seed, static_cast<std::uint64_t>(i));
        CorpusRecord r;
        r.id = "syn-" + std::to_string(i);
        if (languages.empty()) {
            const auto task = make_task(seed, pivot, difficulty);
            r.prompt = task.prompt;
            r.prompt_language = pivot.code();
        } else {
            const auto& lang = languages[static_cast<std::size_t>(i) % languages.size()];
            const auto task = make_task(seed, lang, difficulty);
            r.prompt = task.prompt;
            r.prompt_language = lang.code();
            r.source_prompt = pivot_prompt(task.operands);
            r.pivot_reference = task.pivot_reference;
            r.status = RecordStatus::Referenced;
            // Every third prediction is wrong and every fifth malformed, so the
            // fixture exercises all reward tiers.
            std::string text = render_target_response(task);
            if (i % 5 == 4) {
                text = lang.to_language_text(task.pivot_reference.reasoning);
            } else if (i % 3 == 2) {
                const auto wrong = std::to_string(std::stoll(task.canonical_answer) == 0 ? 1 : 0);
                text = render_response(lang.to_language_text(task.pivot_reference.reasoning), lang.to_language(wrong));
            }
            r.prediction = RawResponse{text, lang.code()};
        }
        shard.push_back(std::move(r));
    }
    write_text(a.output, shard_to_jsonl(shard), out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cross-lingual verifiable rewards: scoring, data pipeline, toy GRPO training and reports", "pivotrl"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "pivotrl 0.1.0");

    ScoreArgs score;
    auto* sc = app.add_subcommand("score", "Score a JSONL corpus of predictions against pivot references");
    sc->add_option("--input", score.input, "Input JSONL")->required();
    sc->add_option("--mode", score.mode, "Reward preset (default: from config)");
    sc->add_option("--config", score.config, "Config file (default: $PIVOTRL_CONFIG)");
    sc->add_option("--output", score.output, "Output JSONL, '-' for stdout");
    sc->add_option("--workers", score.workers, "Concurrent records")->check(CLI::PositiveNumber);

    PipelineArgs pipe;
    auto* pl = app.add_subcommand("pipeline", "Dataset construction");
    pl->require_subcommand(1);
    auto* run_cmd = pl->add_subcommand("run", "partition, translate, reference, filter, persist");
    run_cmd->add_option("--input", pipe.input, "Pivot-language corpus JSONL")->required();
    run_cmd->add_option("--languages", pipe.languages, "Target language codes")->required()->delimiter(',');
    run_cmd->add_option("--providers", pipe.providers, "Config file with provider settings");
    run_cmd->add_option("--out-dir", pipe.out_dir, "Output directory")->required();
    run_cmd->add_option("--seed", pipe.seed, "Partition seed");
    run_cmd->add_option("--workers", pipe.workers, "Concurrent records")->check(CLI::PositiveNumber);

    TrainArgs train;
    auto* tr = app.add_subcommand("train-toy", "GRPO on the synthetic multilingual task");
    tr->add_option("--languages", train.languages, "Number of non-pivot languages")->check(CLI::NonNegativeNumber);
    tr->add_option("--iterations", train.iterations, "Update steps")->check(CLI::NonNegativeNumber);
    tr->add_option("--group-size", train.group_size, "Samples per prompt");
    tr->add_option("--seed", train.seed, "Sampling seed");
    tr->add_option("--task-seed", train.task_seed, "Seed for languages and prompts");
    tr->add_option("--reward-mode", train.reward_mode, "Reward preset");
    tr->add_option("--history", train.history, "History JSONL output");
    tr->add_option("--lr", train.learning_rate, "Learning rate");
    tr->add_option("--temperature", train.temperature, "Sampling temperature");
    tr->add_option("--kl", train.kl, "KL coefficient");
    tr->add_option("--clip", train.clip, "PPO clip epsilon");
    tr->add_option("--max-epochs", train.max_epochs, "Gradient passes per batch");
    tr->add_option("--prompts", train.prompts, "Prompts per language");
    tr->add_option("--embedder", train.embedder, "aligned_bow or bow")
        ->check(CLI::IsMember({"aligned_bow", "bow"}));

    AblateArgs ablate;
    auto* ab = app.add_subcommand("ablate", "Train once per reward preset and compare");
    ab->add_option("--modes", ablate.modes, "'all' or preset names")->delimiter(',');
    ab->add_option("--seeds", ablate.seeds, "Seeds per mode")->check(CLI::PositiveNumber);
    ab->add_option("--iterations", ablate.iterations, "Update steps per run")->check(CLI::NonNegativeNumber);
    ab->add_option("--out", ablate.out, "CSV output, '-' for stdout")->required();
    ab->add_option("--workers", ablate.workers, "Parallel runs (default: hardware threads)");

    ReportArgs report;
    auto* rp = app.add_subcommand("report", "Pivot vs non-pivot gap report");
    rp->add_option("--history", report.history, "Training history JSONL")->required();
    rp->add_option("--baseline-history", report.baseline, "History whose final entry is the 'before' column");
    rp->add_option("--format", report.format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
    rp->add_option("--pivot", report.pivot, "Pivot language code");

    ServeArgs serve;
    auto* sv = app.add_subcommand("serve", "Run the HTTP scoring service");
    sv->add_option("--config", serve.config, "Config file (default: $PIVOTRL_CONFIG)");
    sv->add_option("--host", serve.host, "Bind address (overrides config)");
    sv->add_option("--port", serve.port, "Port (overrides config)");

    SynthArgs synth;
    auto* sy = app.add_subcommand("synth-corpus", "Generate a synthetic addition corpus");
    sy->add_option("--count", synth.count, "Records");
    sy->add_option("--seed", synth.seed, "Seed");
    sy->add_option("--digits", synth.digits, "Digits per operand");
    sy->add_option("--terms", synth.terms, "Operands per task");
    sy->add_option("--languages", synth.languages, "Emit a scoring fixture in these languages")->delimiter(',');
    sy->add_option("--lexicon-seed", synth.lexicon_seed, "Seed of the synthetic lexicons");
    sy->add_option("--output", synth.output, "Output JSONL, '-' for stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (sc->parsed()) return cmd_score(score, out, err);
        if (run_cmd->parsed()) return cmd_pipeline(pipe, out, err);
        if (tr->parsed()) return cmd_train(train, out, err);
        if (ab->parsed()) return cmd_ablate(ablate, out, err);
        if (rp->parsed()) return cmd_report(report, out, err);
        if (sv->parsed()) return cmd_serve(serve, out, err);
        if (sy->parsed()) return cmd_synth(synth, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}

}  // namespace pivotrl::cli
