// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pivotrl/report.hpp"

#include <iomanip>
#include <sstream>

#include "pivotrl/error.hpp"

namespace pivotrl {

namespace {

double gap(const std::map<std::string, double>& values, const std::string& pivot) {
    double sum = 0.0;
    double n = 0.0;
    for (const auto& [code, v] : values) {
        if (code == pivot) continue;
        sum += v;
        n += 1.0;
    }
    return values.at(pivot) - sum / n;
}

void check(const IterationStats& s, const std::string& pivot, const char* which) {
    if (!s.mean_reward.count(pivot) || !s.oracle_accuracy.count(pivot)) {
        throw Error(ErrorKind::InvalidArgument, std::string(which) + " history lacks pivot language '" + pivot + "'");
    }
    if (s.mean_reward.size() < 2) throw Error(ErrorKind::InvalidArgument, std::string(which) + " history has no non-pivot language");
}

std::string fixed(double x) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(6) << x;
    return out.str();
}

}  // namespace

GapReport make_gap_report(const TrainingHistory& history, const TrainingHistory* baseline, const std::string& pivot) {
    if (history.empty()) throw Error(ErrorKind::InvalidArgument, "history is empty");
    if (baseline != nullptr && baseline->empty()) throw Error(ErrorKind::InvalidArgument, "baseline history is empty");
    const auto& before = baseline != nullptr ? baseline->back() : history.front();
    const auto& after = history.back();
    check(before, pivot, baseline != nullptr ? "baseline" : "initial");
    check(after, pivot, "final");

    GapReport r;
    r.pivot = pivot;
    auto add = [&](const std::string& code) {
        LanguageRow row;
        row.language = code;
        row.is_pivot = code == pivot;
        row.reward_before = before.mean_reward.count(code) ? before.mean_reward.at(code) : 0.0;
        row.reward_after = after.mean_reward.count(code) ? after.mean_reward.at(code) : 0.0;
        row.accuracy_before = before.oracle_accuracy.count(code) ? before.oracle_accuracy.at(code) : 0.0;
        row.accuracy_after = after.oracle_accuracy.count(code) ? after.oracle_accuracy.at(code) : 0.0;
        r.rows.push_back(row);
    };
    add(pivot);
    for (const auto& [code, _] : after.mean_reward) {
        if (code != pivot) add(code);
    }
    r.reward_gap_before = gap(before.mean_reward, pivot);
    r.reward_gap_after = gap(after.mean_reward, pivot);
    r.accuracy_gap_before = gap(before.oracle_accuracy, pivot);
    r.accuracy_gap_after = gap(after.oracle_accuracy, pivot);
    return r;
}

std::string gap_report_csv(const GapReport& report) {
    std::ostringstream out;
    out << "row,language,reward_before,reward_after,reward_delta,accuracy_before,accuracy_after,accuracy_delta\n";
    for (const auto& row : report.rows) {
        out << (row.is_pivot ? "pivot" : "target") << ',' << row.language << ',' << fixed(row.reward_before) << ','
            << fixed(row.reward_after) << ',' << fixed(row.reward_after - row.reward_before) << ','
            << fixed(row.accuracy_before) << ',' << fixed(row.accuracy_after) << ','
            << fixed(row.accuracy_after - row.accuracy_before) << '\n';
    }
    out << "gap," << report.pivot << ',' << fixed(report.reward_gap_before) << ',' << fixed(report.reward_gap_after) << ','
        << fixed(report.reward_gap_delta()) << ',' << fixed(report.accuracy_gap_before) << ','
        << fixed(report.accuracy_gap_after) << ',' << fixed(report.accuracy_gap_after - report.accuracy_gap_before)
        << '\n';
    return out.str();
}

std::string gap_report_table(const GapReport& report) {
    std::ostringstream out;
    auto line = [&](const std::string& label, double rb, double ra, double ab, double aa) {
        out << std::left << std::setw(12) << label << std::right << std::fixed << std::setprecision(3) << std::setw(10)
            << rb << std::setw(10) << ra << std::setw(10) << ra - rb << std::setw(10) << ab << std::setw(10) << aa
            << std::setw(10) << aa - ab << '\n';
    };
    out << std::left << std::setw(12) << "language" << std::right << std::setw(10) << "reward0" << std::setw(10)
        << "reward1" << std::setw(10) << "delta" << std::setw(10) << "acc0" << std::setw(10) << "acc1" << std::setw(10)
        << "delta" << '\n';
    for (const auto& row : report.rows) {
        line(row.is_pivot ? row.language + " (pivot)" : row.language, row.reward_before, row.reward_after,
             row.accuracy_before, row.accuracy_after);
    }
    line("gap", report.reward_gap_before, report.reward_gap_after, report.accuracy_gap_before, report.accuracy_gap_after);
    out << "gap ratio (after / before): " << std::setprecision(3) << report.reward_gap_ratio() << '\n';
    return out.str();
}

}  // namespace pivotrl
