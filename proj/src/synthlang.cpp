// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/synthlang.hpp"

#include <numeric>
#include <set>

#include "pivotrl/error.hpp"
#include "pivotrl/random.hpp"
#include "pivotrl/text.hpp"

namespace pivotrl {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kSyllables = kConsonants.size() * kVowels.size();

std::size_t syllable_digits(std::size_t max_value) {
    std::size_t digits = 1;
    for (std::size_t v = max_value; v >= kSyllables; v /= kSyllables) ++digits;
    return digits;
}

// Fixed-width base-70 spelling, so prefix + suffix words never collide.
std::string spell(std::size_t value, std::size_t width) {
    std::string out(2 * width, ' ');
    for (std::size_t i = width; i-- > 0;) {
        const std::size_t s = value % kSyllables;
        value /= kSyllables;
        out[2 * i] = kConsonants[s / kVowels.size()];
        out[2 * i + 1] = kVowels[s % kVowels.size()];
    }
    return out;
}

std::string map_text(std::string_view s, const std::map<std::string, std::string>& table) {
    auto tokens = text::split_whitespace(s);
    for (auto& t : tokens) {
        if (auto it = table.find(t); it != table.end()) t = it->second;
    }
    return text::join(tokens);
}

long long pow10(int digits) {
    long long p = 1;
    for (int i = 0; i < digits; ++i) p *= 10;
    return p;
}

}  // namespace

std::vector<std::string> pivot_vocabulary(Difficulty difficulty) {
    if (difficulty.digits < 1 || difficulty.terms < 2) {
        throw Error(ErrorKind::InvalidArgument, "difficulty needs digits >= 1 and terms >= 2");
    }
    const long long max_sum = difficulty.terms * (pow10(difficulty.digits) - 1);
    std::vector<std::string> vocab;
    vocab.reserve(static_cast<std::size_t>(max_sum) + 4);
    for (long long n = 0; n <= max_sum; ++n) vocab.push_back(std::to_string(n));
    vocab.emplace_back("+");
    vocab.emplace_back("=");
    vocab.emplace_back(";");
    return vocab;
}

SyntheticLanguage::SyntheticLanguage(std::string code, std::map<std::string, std::string> pivot_to_language)
    : code_(std::move(code)), forward_(std::move(pivot_to_language)) {
    if (code_.empty()) throw Error(ErrorKind::InvalidArgument, "language code must be non-empty");
    identity_ = true;
    for (const auto& [from, to] : forward_) {
        if (from.empty() || to.empty()) throw Error(ErrorKind::InvalidArgument, "empty token in map");
        if (!inverse_.emplace(to, from).second) {
            throw Error(ErrorKind::InvalidArgument, "token map for " + code_ + " is not injective at " + to);
        }
        identity_ = identity_ && from == to;
    }
}

SyntheticLanguage SyntheticLanguage::pivot(std::vector<std::string> vocab, std::string code) {
    std::map<std::string, std::string> identity;
    for (auto& t : vocab) identity.emplace(t, t);
    return SyntheticLanguage(std::move(code), std::move(identity));
}

std::string SyntheticLanguage::to_language(const std::string& pivot_token) const {
    auto it = forward_.find(pivot_token);
    return it == forward_.end() ? pivot_token : it->second;
}

std::string SyntheticLanguage::to_pivot(const std::string& token) const {
    auto it = inverse_.find(token);
    return it == inverse_.end() ? token : it->second;
}

std::string SyntheticLanguage::to_language_text(std::string_view pivot_text) const {
    return map_text(pivot_text, forward_);
}

std::string SyntheticLanguage::to_pivot_text(std::string_view s) const { return map_text(s, inverse_); }

std::vector<SyntheticLanguage> make_languages(std::uint64_t seed, int k, const std::vector<std::string>& vocab) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "need at least one language");
    std::vector<std::string> codes;
    for (int i = 1; i <= k; ++i) codes.push_back("l" + std::to_string(i));
    return make_languages(seed, codes, vocab);
}

std::vector<SyntheticLanguage> make_languages(std::uint64_t seed, const std::vector<std::string>& codes,
                                              const std::vector<std::string>& vocab) {
    if (codes.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one language");
    if (vocab.empty()) throw Error(ErrorKind::InvalidArgument, "vocabulary must be non-empty");
    const std::set<std::string> pivot_tokens(vocab.begin(), vocab.end());
    if (pivot_tokens.size() != vocab.size()) throw Error(ErrorKind::InvalidArgument, "vocabulary has duplicates");

    const std::size_t prefix_width = syllable_digits(codes.size() - 1);
    const std::size_t suffix_width = syllable_digits(vocab.size() - 1);

    std::vector<SyntheticLanguage> out;
    out.reserve(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        Rng rng(mix_seed(seed, i));
        std::vector<std::size_t> perm(vocab.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        shuffle(perm, rng);

        const std::string prefix = spell(i, prefix_width);
        std::map<std::string, std::string> table;
        for (std::size_t j = 0; j < vocab.size(); ++j) {
            std::string word = prefix + spell(perm[j], suffix_width);
            if (pivot_tokens.count(word)) {
                throw Error(ErrorKind::InvalidArgument, "generated token collides with vocabulary: " + word);
            }
            table.emplace(vocab[j], std::move(word));
        }
        out.emplace_back(codes[i], std::move(table));
    }
    return out;
}

std::string pivot_prompt(const std::vector<long long>& operands) {
    std::string out;
    for (std::size_t i = 0; i < operands.size(); ++i) {
        if (i > 0) out += " + ";
        out += std::to_string(operands[i]);
    }
    out += " =";
    return out;
}

std::string pivot_reasoning(const std::vector<long long>& operands) {
    std::string out;
    long long sum = operands.empty() ? 0 : operands.front();
    for (std::size_t i = 1; i < operands.size(); ++i) {
        if (i > 1) out += " ; ";
        const long long next = sum + operands[i];
        out += std::to_string(sum) + " + " + std::to_string(operands[i]) + " = " + std::to_string(next);
        sum = next;
    }
    return out;
}

SyntheticTaskInstance make_task_from_operands(const std::vector<long long>& operands,
                                              const SyntheticLanguage& language, std::string_view pivot_code) {
    if (operands.size() < 2) throw Error(ErrorKind::InvalidArgument, "a task needs at least two operands");
    long long sum = 0;
    for (long long x : operands) {
        if (x < 0) throw Error(ErrorKind::InvalidArgument, "operands must be non-negative");
        sum += x;
    }
    const std::string reasoning = pivot_reasoning(operands);
    const std::string prompt = pivot_prompt(operands);
    for (const auto& tok : text::split_whitespace(reasoning + " " + prompt)) {
        if (!language.covers(tok)) {
            throw Error(ErrorKind::InvalidArgument,
                        "language " + language.code() + " has no token for '" + tok + "'");
        }
    }

    SyntheticTaskInstance inst{
        .prompt = language.to_language_text(prompt),
        .target_language = language.code(),
        .pivot_reference = make_reference(reasoning, std::to_string(sum), pivot_code),
        .canonical_answer = std::to_string(sum),
        .operands = operands,
        .language = language,
    };
    return inst;
}

SyntheticTaskInstance make_task(std::uint64_t seed, const SyntheticLanguage& language, Difficulty difficulty,
                                std::string_view pivot_code) {
    if (difficulty.digits < 1 || difficulty.terms < 2) {
        throw Error(ErrorKind::InvalidArgument, "difficulty needs digits >= 1 and terms >= 2");
    }
    Rng rng(mix_seed(seed, 0x7A5C));
    const auto bound = static_cast<std::uint64_t>(pow10(difficulty.digits));
    std::vector<long long> operands;
    for (int i = 0; i < difficulty.terms; ++i) {
        operands.push_back(static_cast<long long>(uniform_index(rng, bound)));
    }
    return make_task_from_operands(operands, language, pivot_code);
}

std::string render_target_response(const SyntheticTaskInstance& instance) {
    return render_response(instance.language.to_language_text(instance.pivot_reference.reasoning),
                           instance.language.to_language_text(instance.pivot_reference.answer));
}

double oracle_semantic_score(const ParsedResponse& pred, const SyntheticTaskInstance& instance) {
    if (!pred.well_formed) return 0.0;
    const auto& lang = instance.language;
    const bool answer_ok = lang.to_pivot_text(pred.answer) == instance.canonical_answer;
    if (!answer_ok) return 0.0;
    const bool reasoning_ok = text::split_whitespace(lang.to_pivot_text(pred.reasoning)) ==
                              text::split_whitespace(instance.pivot_reference.reasoning);
    return reasoning_ok ? 1.0 : 0.5;
}

}  // namespace pivotrl
