#include "bscope/heuristics.h"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "bscope/error.h"
#include "bscope/text.h"

namespace bscope {
namespace {

// Categories in which each reference is mentioned, plus the table flag.
struct Presence {
  std::array<bool, kNumSectionCategories> in{};
  bool table = false;
  bool any() const { return std::any_of(in.begin(), in.end(), [](bool b) { return b; }); }
  int distinct() const {
    return static_cast<int>(std::count(in.begin(), in.end(), true));
  }
};

std::map<std::string, Presence, std::less<>> presence_of(const PaperDoc& doc) {
  std::map<std::string, Presence, std::less<>> out;
  for (const auto& r : doc.references) out[r.ref_id];
  for (const auto& m : doc.mentions) {
    Presence& p = out[m.ref_id];
    p.in[static_cast<std::size_t>(doc.sections[static_cast<std::size_t>(m.section_index)].category)] = true;
    p.table = p.table || m.in_table;
  }
  return out;
}

bool fires(const Presence& p, SectionRule rule) {
  return rule.table ? p.table : p.in[static_cast<std::size_t>(rule.category)];
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

SectionRule SectionRule::parse(std::string_view name) {
  if (name == "table") return in_table();
  if (name == "experiment") return in_section(SectionCategory::kMethodsResults);
  return in_section(parse_section_category(name));
}

std::string_view SectionRule::name() const {
  return table ? std::string_view("table") : to_string(category);
}

std::vector<SectionRule> all_section_rules() {
  std::vector<SectionRule> out;
  for (SectionCategory c : kAllSectionCategories) out.push_back(SectionRule::in_section(c));
  out.push_back(SectionRule::in_table());
  return out;
}

std::vector<std::pair<std::string, Label>> section_rule_classifier(const PaperDoc& doc,
                                                                   SectionRule rule) {
  const auto presence = presence_of(doc);
  std::vector<std::pair<std::string, Label>> out;
  out.reserve(doc.references.size());
  for (const auto& r : doc.references) {
    const bool hit = fires(presence.find(r.ref_id)->second, rule);
    out.emplace_back(r.ref_id, hit ? Label::kBaseline : Label::kNonBaseline);
  }
  return out;
}

double ConfusionCounts::precision() const {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double ConfusionCounts::recall() const {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionCounts evaluate_rule(std::span<const PaperDoc> docs, SectionRule rule) {
  ConfusionCounts c;
  for (const auto& doc : docs) {
    const auto decisions = section_rule_classifier(doc, rule);
    for (std::size_t i = 0; i < doc.references.size(); ++i) {
      const Label gold = doc.references[i].label;
      if (gold == Label::kUnlabeled) continue;
      const bool pred = decisions[i].second == Label::kBaseline;
      const bool pos = gold == Label::kBaseline;
      if (pred && pos) ++c.tp;
      else if (pred) ++c.fp;
      else if (pos) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

std::array<SectionDistributionRow, kNumSectionCategories> section_distribution(
    std::span<const PaperDoc> docs) {
  std::array<SectionDistributionRow, kNumSectionCategories> rows{};
  for (std::size_t i = 0; i < kNumSectionCategories; ++i) rows[i].category = kAllSectionCategories[i];
  for (const auto& doc : docs) {
    const auto presence = presence_of(doc);
    for (const auto& r : doc.references) {
      if (r.label == Label::kUnlabeled) continue;
      const Presence& p = presence.find(r.ref_id)->second;
      const bool exclusive = p.distinct() == 1;
      for (std::size_t c = 0; c < kNumSectionCategories; ++c) {
        if (!p.in[c]) continue;
        if (r.label == Label::kBaseline) {
          ++rows[c].baseline_total;
          if (exclusive) ++rows[c].baseline_exclusive;
        } else {
          ++rows[c].non_baseline_total;
          if (exclusive) ++rows[c].non_baseline_exclusive;
        }
      }
    }
  }
  return rows;
}

std::string YearBucket::label() const { return fmt::format("{}-{}", lo, hi); }

std::vector<YearBucket> default_year_buckets() {
  return {{1980, 2000}, {2001, 2005}, {2006, 2010}, {2011, 2015}};
}

double BucketStats::mean_references() const {
  return papers == 0 ? 0.0 : static_cast<double>(references) / static_cast<double>(papers);
}

double BucketStats::mean_baselines() const {
  return papers == 0 ? 0.0 : static_cast<double>(baselines) / static_cast<double>(papers);
}

CorpusStats corpus_stats(std::span<const PaperDoc> docs, std::span<const YearBucket> buckets) {
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (buckets[i].lo > buckets[i].hi) {
      throw InvalidArgument("year bucket " + buckets[i].label() + " is inverted");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (buckets[i].lo <= buckets[j].hi && buckets[j].lo <= buckets[i].hi) {
        throw InvalidArgument("year buckets " + buckets[j].label() + " and " +
                              buckets[i].label() + " overlap");
      }
    }
  }
  CorpusStats out;
  for (const auto& b : buckets) out.buckets.push_back({b, 0, 0, 0});
  for (const auto& doc : docs) {
    auto it = std::find_if(out.buckets.begin(), out.buckets.end(), [&](const BucketStats& s) {
      return doc.year >= s.bucket.lo && doc.year <= s.bucket.hi;
    });
    if (it == out.buckets.end()) {
      out.excluded_papers.push_back(doc.paper_id);
      continue;
    }
    ++it->papers;
    it->references += doc.references.size();
    it->baselines += static_cast<std::size_t>(std::count_if(
        doc.references.begin(), doc.references.end(),
        [](const Reference& r) { return r.label == Label::kBaseline; }));
  }
  return out;
}

DatasetSummary dataset_summary(std::span<const PaperDoc> docs) {
  DatasetSummary s;
  s.papers = docs.size();
  for (const auto& d : docs) {
    for (const auto& r : d.references) {
      switch (r.label) {
        case Label::kBaseline: ++s.baseline_references; break;
        case Label::kNonBaseline: ++s.non_baseline_references; break;
        case Label::kUnlabeled: ++s.unlabeled_references; break;
      }
    }
  }
  return s;
}

std::string summary_csv(const DatasetSummary& s) {
  return fmt::format("papers,baseline_references,non_baseline_references,unlabeled_references\n"
                     "{},{},{},{}\n",
                     s.papers, s.baseline_references, s.non_baseline_references,
                     s.unlabeled_references);
}

std::string corpus_stats_csv(const CorpusStats& stats) {
  std::string out = "period,papers,references,baselines,mean_references,mean_baselines\n";
  for (const auto& b : stats.buckets) {
    out += fmt::format("{},{},{},{},{},{}\n", b.bucket.label(), b.papers, b.references,
                       b.baselines, format_fixed(b.mean_references()),
                       format_fixed(b.mean_baselines()));
  }
  return out;
}

std::string section_distribution_csv(
    const std::array<SectionDistributionRow, kNumSectionCategories>& rows) {
  std::string out =
      "section,baselines,baselines_exclusive,non_baselines,non_baselines_exclusive\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", to_string(r.category), r.baseline_total,
                       r.baseline_exclusive, r.non_baseline_total, r.non_baseline_exclusive);
  }
  return out;
}

std::string rule_metrics_csv(std::span<const PaperDoc> docs) {
  std::string out = "rule,tp,fp,fn,tn,precision,recall\n";
  for (const SectionRule rule : all_section_rules()) {
    const ConfusionCounts c = evaluate_rule(docs, rule);
    out += fmt::format("{},{},{},{},{},{},{}\n", rule.name(), c.tp, c.fp, c.fn, c.tn,
                       format_fixed(c.precision(), 3), format_fixed(c.recall(), 3));
  }
  return out;
}

std::string summary_text(const DatasetSummary& s) {
  return fmt::format("Papers                   {:>8}\n"
                     "Baseline references      {:>8}\n"
                     "Non-baseline references  {:>8}\n"
                     "Unlabeled references     {:>8}\n",
                     s.papers, s.baseline_references, s.non_baseline_references,
                     s.unlabeled_references);
}

std::string corpus_stats_text(const CorpusStats& stats) {
  std::string out = pad_right("", 26);
  for (const auto& b : stats.buckets) out += pad_left(b.bucket.label(), 12);
  out += '\n';
  auto row = [&](std::string name, auto cell) {
    out += pad_right(std::move(name), 26);
    for (const auto& b : stats.buckets) out += pad_left(cell(b), 12);
    out += '\n';
  };
  row("# Papers", [](const BucketStats& b) { return std::to_string(b.papers); });
  row("# References", [](const BucketStats& b) { return std::to_string(b.references); });
  row("# Baselines", [](const BucketStats& b) { return std::to_string(b.baselines); });
  row("Mean references per paper",
      [](const BucketStats& b) { return format_fixed(b.mean_references()); });
  row("Mean baselines per paper",
      [](const BucketStats& b) { return format_fixed(b.mean_baselines()); });
  if (!stats.excluded_papers.empty()) {
    out += fmt::format("Excluded (year outside buckets): {}\n", stats.excluded_papers.size());
  }
  return out;
}

std::string section_distribution_text(
    const std::array<SectionDistributionRow, kNumSectionCategories>& rows) {
  std::string out = pad_right("Section", 18) + pad_left("# baselines", 18) +
                    pad_left("# non-baselines", 20) + "\n";
  for (const auto& r : rows) {
    out += pad_right(std::string(to_string(r.category)), 18) +
           pad_left(fmt::format("{} ({})", r.baseline_total, r.baseline_exclusive), 18) +
           pad_left(fmt::format("{} ({})", r.non_baseline_total, r.non_baseline_exclusive), 20) +
           "\n";
  }
  return out;
}

std::string rule_metrics_text(std::span<const PaperDoc> docs) {
  std::string out = pad_right("Rule", 18) + pad_left("Precision", 12) + pad_left("Recall", 12) + "\n";
  for (const SectionRule rule : all_section_rules()) {
    const ConfusionCounts c = evaluate_rule(docs, rule);
    out += pad_right(std::string(rule.name()), 18) + pad_left(format_fixed(c.precision(), 3), 12) +
           pad_left(format_fixed(c.recall(), 3), 12) + "\n";
  }
  return out;
}

}  // namespace bscope
