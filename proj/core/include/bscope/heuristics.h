#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bscope/types.h"

namespace bscope {

// "Everything cited in section X (or in any table) is a baseline."
struct SectionRule {
  bool table = false;
  SectionCategory category = SectionCategory::kMethodsResults;

  static SectionRule in_table() { return {true, SectionCategory::kOther}; }
  static SectionRule in_section(SectionCategory c) { return {false, c}; }
  // "introduction", ..., "other", or "table".
  static SectionRule parse(std::string_view name);
  std::string_view name() const;

  friend bool operator==(const SectionRule&, const SectionRule&) = default;
};

// The five section rules followed by the table rule.
std::vector<SectionRule> all_section_rules();

// One label per reference, in reference order.
std::vector<std::pair<std::string, Label>> section_rule_classifier(
    const PaperDoc& doc, SectionRule rule);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  // 0 when the denominator is 0.
  double precision() const;
  double recall() const;

  ConfusionCounts& operator+=(const ConfusionCounts& o);
  friend bool operator==(const ConfusionCounts&,
                         const ConfusionCounts&) = default;
};

// Rule decisions scored against gold labels of every labeled reference.
ConfusionCounts evaluate_rule(std::span<const PaperDoc> docs, SectionRule rule);

struct SectionDistributionRow {
  SectionCategory category = SectionCategory::kOther;
  std::size_t baseline_total = 0;
  std::size_t baseline_exclusive = 0;
  std::size_t non_baseline_total = 0;
  std::size_t non_baseline_exclusive = 0;

  friend bool operator==(const SectionDistributionRow&,
                         const SectionDistributionRow&) = default;
};

// Per category: labeled references with at least one mention there, and
// those whose mentions all fall in that one category.
std::array<SectionDistributionRow, kNumSectionCategories> section_distribution(
    std::span<const PaperDoc> docs);

struct YearBucket {
  int lo = 0;  // inclusive
  int hi = 0;  // inclusive

  std::string label() const;
  friend bool operator==(const YearBucket&, const YearBucket&) = default;
};

// 1980-2000, 2001-2005, 2006-2010, 2011-2015.
std::vector<YearBucket> default_year_buckets();

struct BucketStats {
  YearBucket bucket;
  std::size_t papers = 0;
  std::size_t references = 0;
  std::size_t baselines = 0;

  double mean_references() const;
  double mean_baselines() const;
};

struct CorpusStats {
  std::vector<BucketStats> buckets;
  std::vector<std::string> excluded_papers;  // year outside every bucket
};

// Throws InvalidArgument for overlapping or inverted buckets.
CorpusStats corpus_stats(std::span<const PaperDoc> docs,
                         std::span<const YearBucket> buckets);

struct DatasetSummary {
  std::size_t papers = 0;
  std::size_t baseline_references = 0;
  std::size_t non_baseline_references = 0;
  std::size_t unlabeled_references = 0;
};

DatasetSummary dataset_summary(std::span<const PaperDoc> docs);

// CSV renderings (header row first) and aligned text tables.
std::string summary_csv(const DatasetSummary& s);
std::string corpus_stats_csv(const CorpusStats& stats);
std::string section_distribution_csv(
    const std::array<SectionDistributionRow, kNumSectionCategories>& rows);
std::string rule_metrics_csv(std::span<const PaperDoc> docs);

std::string summary_text(const DatasetSummary& s);
std::string corpus_stats_text(const CorpusStats& stats);
std::string section_distribution_text(
    const std::array<SectionDistributionRow, kNumSectionCategories>& rows);
std::string rule_metrics_text(std::span<const PaperDoc> docs);

}  // namespace bscope
