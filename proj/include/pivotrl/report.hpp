// Copyright 2026 The pivotrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "pivotrl/trainer.hpp"

namespace pivotrl {

struct LanguageRow {
    std::string language;
    bool is_pivot = false;
    double reward_before = 0.0;
    double reward_after = 0.0;
    double accuracy_before = 0.0;
    double accuracy_after = 0.0;
};

// gap = pivot - mean over non-pivot languages, for reward and accuracy.
struct GapReport {
    std::string pivot;
    std::vector<LanguageRow> rows;  // pivot first, then the rest by code
    double reward_gap_before = 0.0;
    double reward_gap_after = 0.0;
    double accuracy_gap_before = 0.0;
    double accuracy_gap_after = 0.0;

    double reward_gap_delta() const { return reward_gap_after - reward_gap_before; }
    // after / before; 0 when the untrained gap is already 0.
    double reward_gap_ratio() const { return reward_gap_before == 0.0 ? 0.0 : reward_gap_after / reward_gap_before; }
};

// Without a baseline, "before" is the first history entry and "after" the
// last. With one, "before" is the baseline's last entry. Throws
// InvalidArgument when a history is empty, lacks the pivot, or has no
// non-pivot language.
GapReport make_gap_report(const TrainingHistory& history, const TrainingHistory* baseline = nullptr,
                          const std::string& pivot = std::string(kDefaultPivot));

// Columns: row,language,reward_before,reward_after,reward_delta,
// accuracy_before,accuracy_after,accuracy_delta. `row` is pivot, target or
// gap; the gap row carries pivot minus the non-pivot mean.
std::string gap_report_csv(const GapReport& report);
std::string gap_report_table(const GapReport& report);

}  // namespace pivotrl
