#pragma once

// Reference computations written without the library's helpers, for
// cross-checking library results.

#include <array>
#include <span>
#include <vector>

#include "bscope/heuristics.h"
#include "bscope/types.h"

namespace bscope::testing {

double ratio(std::size_t num, std::size_t den);

// TP/FP/FN/TN of "every reference mentioned in the rule's section (or in any
// table) is a baseline", recounted mention by mention.
ConfusionCounts brute_force_rule(std::span<const PaperDoc> docs, SectionRule rule);

std::array<SectionDistributionRow, kNumSectionCategories> brute_force_distribution(
    std::span<const PaperDoc> docs);

// Confusion counts with baseline as the positive class.
ConfusionCounts brute_force_confusion(std::span<const Label> gold,
                                      std::span<const Label> predicted);

// Cohen's kappa from the 3x3 contingency table of the two label sequences.
double contingency_kappa(const std::vector<Label>& a, const std::vector<Label>& b);

}  // namespace bscope::testing
