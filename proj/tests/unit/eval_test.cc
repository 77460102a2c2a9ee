#include <gtest/gtest.h>

#include <algorithm>
#include <nlohmann/json.hpp>

#include "bscope/error.h"
#include "bscope/eval.h"
#include "bscope/rng.h"
#include "fixtures.h"
#include "oracles.h"

namespace bscope {
namespace {

using testing::DocBuilder;

TEST(Metrics, MacroAverageOfTheReportedClassRows) {
  const ClassMetrics baseline{0.69, 0.57, 0.63};
  const ClassMetrics other{0.96, 0.98, 0.97};
  const ClassMetrics overall = macro_average(baseline, other);
  EXPECT_NEAR(overall.precision, 0.825, 1e-12);
  EXPECT_NEAR(overall.recall, 0.775, 1e-12);
  EXPECT_NEAR(overall.f1, 0.80, 1e-12);
}

TEST(Metrics, F1Definition) {
  EXPECT_DOUBLE_EQ(f1_score(0.5, 1.0), 2.0 / 3.0);
  EXPECT_EQ(f1_score(0.0, 0.0), 0.0);
}

TEST(Metrics, RandomLabelsMatchRecount) {
  Rng rng(200);
  std::vector<Label> gold, pred;
  for (int i = 0; i < 200; ++i) {
    gold.push_back(rng.uniform() < 0.3 ? Label::kBaseline : Label::kNonBaseline);
    pred.push_back(rng.uniform() < 0.35 ? Label::kBaseline : Label::kNonBaseline);
  }
  const MetricsReport r = compute_metrics(gold, pred);
  const ConfusionCounts c = testing::brute_force_confusion(gold, pred);
  EXPECT_EQ(r.confusion, c);
  const double bp = testing::ratio(c.tp, c.tp + c.fp);
  const double br = testing::ratio(c.tp, c.tp + c.fn);
  const double np = testing::ratio(c.tn, c.tn + c.fn);
  const double nr = testing::ratio(c.tn, c.tn + c.fp);
  EXPECT_DOUBLE_EQ(r.baseline.precision, bp);
  EXPECT_DOUBLE_EQ(r.baseline.recall, br);
  EXPECT_DOUBLE_EQ(r.non_baseline.precision, np);
  EXPECT_DOUBLE_EQ(r.non_baseline.recall, nr);
  EXPECT_DOUBLE_EQ(r.overall.precision, (bp + np) / 2);
  EXPECT_DOUBLE_EQ(r.overall.f1, (2 * bp * br / (bp + br) + 2 * np * nr / (np + nr)) / 2);
  EXPECT_DOUBLE_EQ(r.accuracy(), testing::ratio(c.tp + c.tn, 200));
  // Macro values lie between the class values.
  EXPECT_GE(r.overall.f1, std::min(r.baseline.f1, r.non_baseline.f1));
  EXPECT_LE(r.overall.f1, std::max(r.baseline.f1, r.non_baseline.f1));

  // Order invariance.
  std::vector<std::size_t> idx(200);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(std::span<std::size_t>(idx));
  std::vector<Label> g2, p2;
  for (auto i : idx) {
    g2.push_back(gold[i]);
    p2.push_back(pred[i]);
  }
  EXPECT_EQ(metrics_json(compute_metrics(g2, p2)), metrics_json(r));
}

TEST(Metrics, DegenerateInputs) {
  const std::vector<Label> gold = {Label::kBaseline, Label::kNonBaseline, Label::kNonBaseline};
  const auto perfect = compute_metrics(gold, gold);
  EXPECT_EQ(perfect.overall.f1, 1.0);
  const std::vector<Label> none(3, Label::kNonBaseline);
  EXPECT_EQ(compute_metrics(gold, none).baseline.recall, 0.0);
  EXPECT_THROW(compute_metrics(gold, std::span<const Label>(none).subspan(0, 2)), InvalidArgument);
  EXPECT_THROW(compute_metrics(std::span<const Label>{}, std::span<const Label>{}),
               InvalidArgument);
}

TEST(Metrics, RenderingsAreStable) {
  const std::vector<Label> gold = {Label::kBaseline, Label::kNonBaseline, Label::kBaseline};
  const std::vector<Label> pred = {Label::kBaseline, Label::kBaseline, Label::kNonBaseline};
  const auto r = compute_metrics(gold, pred);
  const auto j = nlohmann::json::parse(metrics_json(r));
  EXPECT_DOUBLE_EQ(j["baseline"]["precision"].get<double>(), 0.5);
  EXPECT_NE(metrics_csv(r).find("baseline"), std::string::npos);
  EXPECT_NE(metrics_text(r).find("0.50"), std::string::npos);
}

PaperDoc error_doc() {
  DocBuilder b("E1");
  const int exp = b.section("Experiments");
  const int conc = b.section("Conclusion");
  b.paragraph(exp, {"we use the dataset of @d"});
  b.paragraph(exp, {"@t 90.1"});
  b.mark_table(exp, 1, 0);
  b.paragraph(exp, {"methods @s1 @s2 @s3 and @s4 differ"});
  b.paragraph(conc, {"future work could adopt @f"});
  for (const char* id : {"d", "t", "s1", "s2", "s3", "s4", "f", "ok"}) b.reference(id, Label::kBaseline);
  b.cite("d", exp, 0, 0, 5).cite("t", exp, 1, 0, 0);
  b.cite("s1", exp, 2, 0, 1).cite("s2", exp, 2, 0, 2).cite("s3", exp, 2, 0, 3).cite("s4", exp, 2, 0, 5);
  b.cite("f", conc, 0, 0, 4);
  return b.build();
}

TEST(ErrorReport, Buckets) {
  const std::vector<PaperDoc> docs = {error_doc()};
  std::vector<ReferencePrediction> preds;
  for (const auto& r : docs[0].references) {
    preds.push_back({"E1", r.ref_id, r.ref_id == "ok" ? Label::kBaseline : Label::kNonBaseline, 0.1});
  }
  const auto records = error_report(docs, preds, CueLexicon::defaults());
  ASSERT_EQ(records.size(), 7u);
  auto buckets_of = [&](const std::string& id) {
    for (const auto& r : records) {
      if (r.ref_id == id) return r.buckets;
    }
    return std::vector<ErrorBucket>{};
  };
  EXPECT_EQ(buckets_of("d"), std::vector<ErrorBucket>{ErrorBucket::kDatasetCitation});
  EXPECT_EQ(buckets_of("t"), std::vector<ErrorBucket>{ErrorBucket::kTableOnly});
  EXPECT_EQ(buckets_of("s1"), std::vector<ErrorBucket>{ErrorBucket::kSharedContext});
  EXPECT_EQ(buckets_of("f"), std::vector<ErrorBucket>{ErrorBucket::kFutureWork});
  EXPECT_NE(error_report_csv(records).find("table_only"), std::string::npos);
  EXPECT_FALSE(error_report_text(records).empty());
}

TEST(ErrorReport, NoErrorsGivesEmptyReport) {
  const std::vector<PaperDoc> docs = {error_doc()};
  std::vector<ReferencePrediction> preds;
  for (const auto& r : docs[0].references) preds.push_back({"E1", r.ref_id, r.label, 0.9});
  EXPECT_TRUE(error_report(docs, preds, CueLexicon::defaults()).empty());
  preds.push_back({"E1", "ghost", Label::kBaseline, 0.9});
  EXPECT_THROW(error_report(docs, preds, CueLexicon::defaults()), IntegrityError);
}

}  // namespace
}  // namespace bscope
