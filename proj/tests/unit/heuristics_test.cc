#include <gtest/gtest.h>

#include "bscope/error.h"
#include "bscope/heuristics.h"
#include "fixtures.h"
#include "oracles.h"

namespace bscope {
namespace {

TEST(Heuristics, RulesMatchBruteForceRecount) {
  const auto docs = testing::labeled_fixture();
  ASSERT_EQ(docs.size(), 20u);
  for (const SectionRule& rule : all_section_rules()) {
    const ConfusionCounts got = evaluate_rule(docs, rule);
    const ConfusionCounts want = testing::brute_force_rule(docs, rule);
    EXPECT_EQ(got, want) << rule.name();
    EXPECT_EQ(got.precision(), testing::ratio(want.tp, want.tp + want.fp)) << rule.name();
    EXPECT_EQ(got.recall(), testing::ratio(want.tp, want.tp + want.fn)) << rule.name();
  }
}

TEST(Heuristics, PaperDistributionReproducesTheTradeOff) {
  const auto docs = testing::paper_distribution_fixture();
  const auto table = evaluate_rule(docs, SectionRule::in_table());
  const auto exp = evaluate_rule(docs, SectionRule::parse("experiment"));
  EXPECT_NEAR(table.precision(), 0.72, 0.01);
  EXPECT_NEAR(table.recall(), 0.18, 0.01);
  EXPECT_NEAR(exp.precision(), 0.234, 0.01);
  EXPECT_NEAR(exp.recall(), 0.734, 0.01);
  EXPECT_GT(table.precision(), 3 * table.recall());
  EXPECT_GT(exp.recall(), 3 * exp.precision());
}

TEST(Heuristics, ClassifierLabelsEveryReference) {
  const auto docs = testing::labeled_fixture();
  for (const auto& doc : docs) {
    const auto labels = section_rule_classifier(doc, SectionRule::in_table());
    ASSERT_EQ(labels.size(), doc.references.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      EXPECT_EQ(labels[i].first, doc.references[i].ref_id);
    }
  }
  EXPECT_THROW(SectionRule::parse("appendix"), ParseError);
}

TEST(Heuristics, SectionDistributionCountsExclusiveMentions) {
  testing::DocBuilder b("x");
  const int intro = b.section("Introduction");
  const int exp = b.section("Experiments");
  b.paragraph(intro, {"see @a and @b"});
  b.paragraph(exp, {"we beat @a"});
  b.reference("a", Label::kBaseline).reference("b", Label::kNonBaseline);
  b.reference("c", Label::kNonBaseline);
  b.cite("a", intro, 0, 0, 1).cite("b", intro, 0, 0, 3).cite("a", exp, 0, 0, 2);
  const std::vector<PaperDoc> docs = {b.build()};
  const auto rows = section_distribution(docs);
  const auto& in = rows[static_cast<std::size_t>(SectionCategory::kIntroduction)];
  EXPECT_EQ(in.baseline_total, 1u);
  EXPECT_EQ(in.baseline_exclusive, 0u);
  EXPECT_EQ(in.non_baseline_total, 1u);
  EXPECT_EQ(in.non_baseline_exclusive, 1u);
  const auto& mr = rows[static_cast<std::size_t>(SectionCategory::kMethodsResults)];
  EXPECT_EQ(mr.baseline_total, 1u);
  EXPECT_EQ(mr.baseline_exclusive, 0u);
}

TEST(Heuristics, SectionDistributionMatchesOracle) {
  const auto docs = testing::labeled_fixture();
  const auto rows = section_distribution(docs);
  const auto want = testing::brute_force_distribution(docs);
  for (std::size_t c = 0; c < kNumSectionCategories; ++c) EXPECT_EQ(rows[c], want[c]) << c;
}

TEST(Heuristics, YearBuckets) {
  auto docs = testing::labeled_fixture();
  docs[0].year = 1975;
  const auto stats = corpus_stats(docs, default_year_buckets());
  ASSERT_EQ(stats.buckets.size(), 4u);
  EXPECT_EQ(stats.excluded_papers, std::vector<std::string>{docs[0].paper_id});
  std::size_t papers = 0, refs = 0, baselines = 0;
  for (const auto& b : stats.buckets) {
    papers += b.papers;
    refs += b.references;
    baselines += b.baselines;
  }
  EXPECT_EQ(papers, docs.size() - 1);
  std::size_t want_refs = 0, want_baselines = 0;
  for (std::size_t i = 1; i < docs.size(); ++i) {
    want_refs += docs[i].references.size();
    for (const auto& r : docs[i].references) want_baselines += r.label == Label::kBaseline;
  }
  EXPECT_EQ(refs, want_refs);
  EXPECT_EQ(baselines, want_baselines);
  const std::vector<YearBucket> overlapping = {{2000, 2005}, {2005, 2010}};
  EXPECT_THROW(corpus_stats(docs, overlapping), InvalidArgument);
  const std::vector<YearBucket> inverted = {{2010, 2000}};
  EXPECT_THROW(corpus_stats(docs, inverted), InvalidArgument);
}

TEST(Heuristics, EmptyCorpusRendersEmptyTables) {
  const std::vector<PaperDoc> none;
  EXPECT_EQ(evaluate_rule(none, SectionRule::in_table()), ConfusionCounts{});
  EXPECT_FALSE(rule_metrics_csv(none).empty());
  EXPECT_FALSE(corpus_stats_text(corpus_stats(none, default_year_buckets())).empty());
}

}  // namespace
}  // namespace bscope
