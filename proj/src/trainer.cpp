// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pivotrl/error.hpp"
#include "pivotrl/parsing.hpp"
#include "pivotrl/random.hpp"
#include "pivotrl/text.hpp"

namespace pivotrl {

namespace {

constexpr std::uint64_t kEvaluationStream = std::uint64_t{1} << 62;
constexpr std::string_view kTags[] = {kThinkOpen, kThinkClose, kAnswerOpen, kAnswerClose};

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void ToyTaskConfig::validate() const {
    if (languages < 0) throw Error(ErrorKind::InvalidArgument, "languages must be >= 0");
    if (difficulty.digits < 1 || difficulty.terms < 2) {
        throw Error(ErrorKind::InvalidArgument, "difficulty needs digits >= 1 and terms >= 2");
    }
    if (prompts_per_language < 1) throw Error(ErrorKind::InvalidArgument, "prompts_per_language must be >= 1");
    if (text::is_blank(pivot)) throw Error(ErrorKind::InvalidArgument, "pivot code is blank");
    if (!in_unit(prior.pivot_competence) || !in_unit(prior.target_competence) ||
        !in_unit(prior.format_competence) || !in_unit(prior.noise) || prior.noise == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "prior competences must lie in [0, 1] and noise in (0, 1]");
    }
}

ToyEnvironment::ToyEnvironment(ToyTaskConfig config) : config_(std::move(config)) {
    config_.validate();
    vocab_ = pivot_vocabulary(config_.difficulty);
    languages_.push_back(SyntheticLanguage::pivot(vocab_, config_.pivot));
    if (config_.languages > 0) {
        for (auto& lang : make_languages(config_.task_seed, config_.languages, vocab_)) {
            languages_.push_back(std::move(lang));
        }
    }

    prompts_.resize(languages_.size());
    for (std::size_t l = 0; l < languages_.size(); ++l) {
        for (int j = 0; j < config_.prompts_per_language; ++j) {
            const auto seed = mix_seed(mix_seed(config_.task_seed, l), static_cast<std::uint64_t>(j));
            prompts_[l].push_back(std::make_shared<const SyntheticTaskInstance>(
                make_task(seed, languages_[l], config_.difficulty, config_.pivot)));
        }
    }
    length_ = canonical_tokens(*prompts_[0][0]).size();
}

std::vector<int> ToyEnvironment::canonical_tokens(const SyntheticTaskInstance& instance) const {
    const int tag0 = static_cast<int>(vocab_.size());
    std::vector<int> out{tag0};
    auto append = [&](const std::string& text) {
        for (const auto& tok : text::split_whitespace(text)) {
            const auto it = std::find(vocab_.begin(), vocab_.end(), tok);
            if (it == vocab_.end()) throw Error(ErrorKind::InvalidArgument, "token outside the toy vocabulary: " + tok);
            out.push_back(static_cast<int>(it - vocab_.begin()));
        }
    };
    append(instance.pivot_reference.reasoning);
    out.push_back(tag0 + 1);
    out.push_back(tag0 + 2);
    append(instance.pivot_reference.answer);
    out.push_back(tag0 + 3);
    return out;
}

std::string ToyEnvironment::render(const std::vector<int>& tokens, const SyntheticLanguage& language) const {
    std::vector<std::string> words;
    words.reserve(tokens.size());
    for (int t : tokens) {
        const auto v = static_cast<std::size_t>(t);
        words.push_back(is_tag(v) ? std::string(kTags[v - vocab_.size()]) : language.to_language(vocab_[v]));
    }
    return text::join(words);
}

ToyPolicy ToyEnvironment::initial_policy(std::size_t language, std::size_t prompt) const {
    const auto target = canonical_tokens(*prompts_.at(language).at(prompt));
    const auto& prior = config_.prior;
    const std::size_t V = vocab_size();
    const std::size_t content = vocab_.size();
    const double content_c = language == 0 ? prior.pivot_competence : prior.target_competence;
    std::vector<double> logits(length_ * V);
    for (std::size_t p = 0; p < length_; ++p) {
        const auto want = static_cast<std::size_t>(target[p]);
        const bool tag_slot = is_tag(want);
        const double c = tag_slot ? prior.format_competence : content_c;
        const double kind_size = static_cast<double>(tag_slot ? V - content : content);
        for (std::size_t v = 0; v < V; ++v) {
            double prob = prior.noise / static_cast<double>(V);
            if (is_tag(v) == tag_slot) prob += (1.0 - prior.noise) * (1.0 - c) / kind_size;
            if (v == want) prob += (1.0 - prior.noise) * c;
            logits[p * V + v] = std::log(prob);
        }
    }
    return ToyPolicy(length_, V, std::move(logits));
}

ProviderSet ToyEnvironment::deterministic_providers() const {
    std::vector<SyntheticLanguage> targets(languages_.begin() + 1, languages_.end());
    std::shared_ptr<const Embedder> embedder;
    if (config_.embedder == ToyEmbedder::Aligned) {
        embedder = std::make_shared<const AlignedBagOfWordsEmbedder>(targets, config_.pivot);
    } else {
        embedder = std::make_shared<const BagOfWordsEmbedder>();
    }
    auto translator = std::make_shared<const DictionaryTranslator>(std::move(targets), config_.pivot);
    return ProviderSet{
        std::move(embedder),
        translator,
        std::make_shared<const TokenF1AnswerScorer>(translator, config_.pivot),
        std::make_shared<const OracleReferenceGenerator>(languages_),
    };
}

void to_json(nlohmann::json& j, const IterationStats& s) {
    j = nlohmann::json{{"iteration", s.iteration},
                       {"mean_reward", s.mean_reward},
                       {"oracle_accuracy", s.oracle_accuracy},
                       {"loss", s.loss},
                       {"kl", s.kl}};
}

void from_json(const nlohmann::json& j, IterationStats& s) {
    j.at("iteration").get_to(s.iteration);
    j.at("mean_reward").get_to(s.mean_reward);
    j.at("oracle_accuracy").get_to(s.oracle_accuracy);
    j.at("loss").get_to(s.loss);
    j.at("kl").get_to(s.kl);
}

std::string history_to_jsonl(const TrainingHistory& history) {
    std::string out;
    for (const auto& s : history) {
        out += nlohmann::json(s).dump();
        out += '\n';
    }
    return out;
}

void write_history(const TrainingHistory& history, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
    f << history_to_jsonl(history);
    if (!f) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

TrainingHistory read_history(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
    TrainingHistory out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(f, line)) {
        ++number;
        if (text::is_blank(line)) continue;
        try {
            out.push_back(nlohmann::json::parse(line).get<IterationStats>());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::SchemaViolation, path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return out;
}

ToyTrainer::ToyTrainer(TrainerConfig config, ToyTaskConfig task, RewardConfig reward, ProviderSet providers)
    : config_(config),
      env_(std::move(task)),
      reward_(std::move(reward)),
      engine_(providers.embedder || providers.translator || providers.answer_scorer ? std::move(providers)
                                                                                       : env_.deterministic_providers(),
              reward_) {
    config_.validate();
    reward_.validate();
    for (std::size_t l = 0; l < env_.languages().size(); ++l) {
        for (std::size_t j = 0; j < env_.prompts(l).size(); ++j) policies_.push_back(env_.initial_policy(l, j));
    }
    reference_ = policies_;
    for (const auto& p : policies_) {
        optimizers_.emplace_back(config_.optimizer, p.logits().size(), config_.learning_rate);
    }
}

std::size_t ToyTrainer::table(std::size_t language, std::size_t prompt) const {
    return language * static_cast<std::size_t>(env_.config().prompts_per_language) + prompt;
}

ToyTrainer::Scored ToyTrainer::rollout(std::size_t language, std::size_t prompt, const RewardConfig& reward,
                                       std::uint64_t call_index) const {
    const auto& instance = env_.prompts(language)[prompt];
    const auto& lang = env_.languages()[language];
    Scored s{sample_group(policies_[table(language, prompt)], instance, config_, call_index), {}};
    for (const auto& r : s.group.responses) {
        const auto parsed = parse_response(RawResponse{env_.render(r.tokens, lang), lang.code()});
        s.group.rewards.push_back(engine_.score(parsed, instance->pivot_reference, reward).total);
        s.oracle.push_back(oracle_semantic_score(parsed, *instance));
    }
    s.group.advantages = compute_advantages(s.group.rewards);
    return s;
}

IterationStats ToyTrainer::summarize(int iteration, const std::vector<std::vector<Scored>>& by_language) const {
    IterationStats stats;
    stats.iteration = iteration;
    for (std::size_t l = 0; l < by_language.size(); ++l) {
        double reward = 0.0;
        double correct = 0.0;
        double n = 0.0;
        for (const auto& s : by_language[l]) {
            for (std::size_t i = 0; i < s.group.rewards.size(); ++i) {
                reward += s.group.rewards[i];
                correct += s.oracle[i] >= 0.5 ? 1.0 : 0.0;
                n += 1.0;
            }
        }
        const auto& code = env_.languages()[l].code();
        stats.mean_reward[code] = reward / n;
        stats.oracle_accuracy[code] = correct / n;
    }
    return stats;
}

TrainingHistory ToyTrainer::train(int iterations) {
    if (iterations < 0) throw Error(ErrorKind::InvalidArgument, "iterations must be >= 0");
    const std::size_t n_lang = env_.languages().size();
    const auto n_prompts = static_cast<std::size_t>(env_.config().prompts_per_language);
    const auto batch = static_cast<std::size_t>(config_.rollout_batch);
    const std::size_t L = env_.length();
    const std::size_t V = env_.vocab_size();

    TrainingHistory history;
    for (int step = 0; step <= iterations; ++step) {
        const auto it = static_cast<std::uint64_t>(completed_);
        std::vector<std::vector<Scored>> scored(n_lang);
        std::vector<std::size_t> owner;  // table index of each group, flattened over languages
        for (std::size_t l = 0; l < n_lang; ++l) {
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t prompt = (it * batch + b) % n_prompts;
                const auto call = (it * n_lang + l) * batch + b;
                scored[l].push_back(rollout(l, prompt, reward_, call));
                owner.push_back(table(l, prompt));
            }
        }
        IterationStats stats = summarize(static_cast<int>(it), scored);
        const bool update = step < iterations;

        for (int epoch = 0; epoch < (update ? config_.max_epochs : 1); ++epoch) {
            std::vector<std::vector<double>> grads(policies_.size());
            std::vector<int> counts(policies_.size(), 0);
            double loss = 0.0;
            double kl = 0.0;
            std::size_t g = 0;
            for (const auto& groups : scored) {
                for (const auto& s : groups) {
                    const std::size_t t = owner[g++];
                    const auto res = ppo_clip_loss(s.group, policies_[t], reference_[t], config_);
                    if (!std::isfinite(res.loss)) {
                        throw Error(ErrorKind::NonFiniteLoss, "loss became non-finite at iteration " + std::to_string(it));
                    }
                    loss += res.loss;
                    kl += res.kl;
                    if (grads[t].empty()) grads[t].assign(L * V, 0.0);
                    for (std::size_t k = 0; k < grads[t].size(); ++k) grads[t][k] += res.gradient[k];
                    ++counts[t];
                }
            }
            if (epoch == 0) {
                stats.loss = loss / static_cast<double>(owner.size());
                stats.kl = kl / static_cast<double>(owner.size());
            }
            if (!update) break;
            for (std::size_t t = 0; t < policies_.size(); ++t) {
                if (counts[t] == 0) continue;
                for (double& x : grads[t]) x /= counts[t];
                optimizers_[t].step(policies_[t], grads[t]);
            }
        }
        history.push_back(std::move(stats));
        if (update) ++completed_;
    }
    return history;
}

IterationStats ToyTrainer::evaluate(const RewardConfig& reward, std::uint64_t stream) const {
    reward.validate();
    const std::size_t n_lang = env_.languages().size();
    std::vector<std::vector<Scored>> scored(n_lang);
    double kl = 0.0;
    std::uint64_t call = kEvaluationStream | (stream << 32);
    for (std::size_t l = 0; l < n_lang; ++l) {
        for (std::size_t j = 0; j < env_.prompts(l).size(); ++j) {
            scored[l].push_back(rollout(l, j, reward, call++));
            kl += mean_kl(policies_[table(l, j)], reference_[table(l, j)], config_.temperature);
        }
    }
    IterationStats stats = summarize(completed_, scored);
    stats.kl = kl / static_cast<double>(policies_.size());
    return stats;
}

}  // namespace pivotrl
