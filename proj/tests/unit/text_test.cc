#include <gtest/gtest.h>

#include "bscope/error.h"
#include "bscope/sectionmap.h"
#include "bscope/stemmer.h"
#include "bscope/text.h"

namespace bscope {
namespace {

TEST(Text, Normalization) {
  EXPECT_EQ(to_lower("MiXeD 12"), "mixed 12");
  EXPECT_EQ(normalize_whitespace("  Related\t\nWORK  "), "related work");
  EXPECT_EQ(alnum_fold("State-of-the-Art"), "stateoftheart");
  EXPECT_EQ(alnum_fold("F-score,"), "fscore");
}

TEST(Text, FormatFixedRoundsTheStoredValueHalfUp) {
  EXPECT_EQ(format_fixed(0.825), "0.82");  // stored just below .825
  EXPECT_EQ(format_fixed(0.775), "0.78");  // stored just above .775
  EXPECT_EQ(format_fixed(0.125), "0.13");  // exact tie
  EXPECT_EQ(format_fixed(0.8), "0.80");
  EXPECT_EQ(format_fixed(-0.125), "-0.13");
  EXPECT_EQ(format_fixed(1.0, 3), "1.000");
  EXPECT_EQ(format_fixed(0.734, 3), "0.734");
}

TEST(SectionMap, KeywordTable) {
  EXPECT_EQ(categorize_heading("1 Introduction"), SectionCategory::kIntroduction);
  EXPECT_EQ(categorize_heading("Related Work"), SectionCategory::kRelated);
  EXPECT_EQ(categorize_heading("Background"), SectionCategory::kRelated);
  EXPECT_EQ(categorize_heading("Experimental Setup"), SectionCategory::kMethodsResults);
  EXPECT_EQ(categorize_heading("Empirical Evaluation"), SectionCategory::kMethodsResults);
  EXPECT_EQ(categorize_heading("Error Analysis"), SectionCategory::kMethodsResults);
  EXPECT_EQ(categorize_heading("Discussion"), SectionCategory::kMethodsResults);
  EXPECT_EQ(categorize_heading("Conclusion"), SectionCategory::kConclusion);
  EXPECT_EQ(categorize_heading("Future Work"), SectionCategory::kConclusion);
  EXPECT_EQ(categorize_heading("Acknowledgments"), SectionCategory::kOther);
  EXPECT_EQ(categorize_heading(""), SectionCategory::kOther);
}

TEST(SectionMap, PriorityResolvesMultipleHits) {
  EXPECT_EQ(categorize_heading("Results and Conclusions"), SectionCategory::kConclusion);
  EXPECT_EQ(categorize_heading("Introduction and Related Work"), SectionCategory::kIntroduction);
  EXPECT_EQ(categorize_heading("Previous Work on Evaluation"), SectionCategory::kRelated);
  EXPECT_EQ(categorize_heading("  RELATED\n  work "), SectionCategory::kRelated);
}

TEST(SectionMap, JsonRoundTripAndOverride) {
  const auto& d = SectionKeywordTable::defaults();
  const auto back = SectionKeywordTable::from_json(d.to_json());
  EXPECT_EQ(back.to_json(), d.to_json());
  const auto custom = SectionKeywordTable::from_json(
      R"({"version": "section-keywords/1", "rules": [{"category": "methods_results", "keywords": ["setup"]}]})");
  EXPECT_EQ(custom.categorize("Setup"), SectionCategory::kMethodsResults);
  EXPECT_EQ(custom.categorize("Introduction"), SectionCategory::kOther);
  EXPECT_THROW(SectionKeywordTable::from_json(R"({"version": "x", "rules": []})"), ParseError);
}

struct StemCase {
  const char* word;
  const char* stem;
};

// Reference outputs of the original Porter algorithm.
constexpr StemCase kStems[] = {
    {"baselines", "baselin"},   {"evaluation", "evalu"},     {"evaluated", "evalu"},
    {"comparison", "comparison"}, {"compared", "compar"},    {"overall", "overal"},
    {"previous", "previou"},    {"significantly", "significantli"},
    {"accuracy", "accuraci"},   {"precision", "precis"},     {"experiments", "experi"},
    {"performance", "perform"}, {"implementation", "implement"},
    {"correlation", "correl"},  {"recall", "recal"},         {"increase", "increas"},
    {"fscore", "fscore"},       {"score", "score"},          {"higher", "higher"},
    {"highest", "highest"},     {"based", "base"},           {"corpus", "corpu"},
    {"ponies", "poni"},         {"ties", "ti"},              {"relational", "relat"},
    {"conditional", "condit"},  {"rational", "ration"},      {"valenci", "valenc"},
    {"hesitanci", "hesit"},     {"digitizer", "digit"},      {"conformabli", "conform"},
    {"radicalli", "radic"},     {"generalization", "gener"}, {"oscillators", "oscil"},
    {"hopping", "hop"},         {"sized", "size"},           {"filing", "file"},
    {"happy", "happi"},         {"agreed", "agre"},          {"controll", "control"},
    {"roll", "roll"},
};

TEST(Stemmer, MatchesReferenceOutputs) {
  for (const auto& c : kStems) EXPECT_EQ(porter_stem(c.word), c.stem) << c.word;
}

TEST(Stemmer, TokenNormalization) {
  EXPECT_EQ(stem("State-of-the-Art"), "stateoftheart");
  EXPECT_EQ(stem("F-score"), "fscore");
  EXPECT_EQ(stem("Baselines,"), "baselin");
  EXPECT_EQ(stem("--"), "");
  EXPECT_EQ(porter_stem("is"), "is");
}

}  // namespace
}  // namespace bscope
