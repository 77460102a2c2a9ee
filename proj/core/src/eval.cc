#include "bscope/eval.h"

#include <map>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bscope/context.h"
#include "bscope/error.h"
#include "bscope/stemmer.h"
#include "bscope/text.h"

namespace bscope {

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

ClassMetrics macro_average(const ClassMetrics& a, const ClassMetrics& b) {
  return {(a.precision + b.precision) / 2.0, (a.recall + b.recall) / 2.0, (a.f1 + b.f1) / 2.0};
}

double MetricsReport::accuracy() const {
  const std::size_t n = support();
  return n == 0 ? 0.0 : static_cast<double>(confusion.tp + confusion.tn) / static_cast<double>(n);
}

MetricsReport compute_metrics(std::span<const Label> gold, std::span<const Label> predicted) {
  if (gold.size() != predicted.size()) {
    throw InvalidArgument("compute_metrics: gold and predicted differ in length");
  }
  if (gold.empty()) throw InvalidArgument("compute_metrics: empty input");
  MetricsReport r;
  ConfusionCounts& c = r.confusion;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == Label::kUnlabeled || predicted[i] == Label::kUnlabeled) {
      throw InvalidArgument("compute_metrics: unlabeled entry at index " + std::to_string(i));
    }
    const bool g = gold[i] == Label::kBaseline;
    const bool p = predicted[i] == Label::kBaseline;
    if (g && p) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  r.baseline.precision = c.precision();
  r.baseline.recall = c.recall();
  r.baseline.f1 = f1_score(r.baseline.precision, r.baseline.recall);
  // Negative class: swap roles of positives and negatives.
  const ConfusionCounts neg{c.tn, c.fn, c.fp, c.tp};
  r.non_baseline.precision = neg.precision();
  r.non_baseline.recall = neg.recall();
  r.non_baseline.f1 = f1_score(r.non_baseline.precision, r.non_baseline.recall);
  r.overall = macro_average(r.baseline, r.non_baseline);
  return r;
}

std::string metrics_json(const MetricsReport& report) {
  auto cls = [](const ClassMetrics& m) {
    nlohmann::ordered_json j;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    return j;
  };
  nlohmann::ordered_json j;
  j["baseline"] = cls(report.baseline);
  j["non_baseline"] = cls(report.non_baseline);
  j["overall"] = cls(report.overall);
  j["accuracy"] = report.accuracy();
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"fp", report.confusion.fp},
                    {"fn", report.confusion.fn},
                    {"tn", report.confusion.tn}};
  j["support"] = report.support();
  return j.dump(2) + "\n";
}

std::string metrics_csv(const MetricsReport& report) {
  std::string out = "class,precision,recall,f1\n";
  auto row = [&](std::string_view name, const ClassMetrics& m) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", name, m.precision, m.recall, m.f1);
  };
  row("baseline", report.baseline);
  row("non_baseline", report.non_baseline);
  row("overall", report.overall);
  return out;
}

std::string metrics_text(const MetricsReport& report) {
  std::string out = fmt::format("{:<14}{:>11}{:>9}{:>7}\n", "", "Precision", "Recall", "F-1");
  auto row = [&](std::string_view name, const ClassMetrics& m) {
    out += fmt::format("{:<14}{:>11}{:>9}{:>7}\n", name, format_fixed(m.precision),
                       format_fixed(m.recall), format_fixed(m.f1));
  };
  row("Baselines", report.baseline);
  row("Non-baselines", report.non_baseline);
  row("Overall", report.overall);
  const auto& c = report.confusion;
  out += fmt::format("TP {}  FP {}  FN {}  TN {}  accuracy {}\n", c.tp, c.fp, c.fn, c.tn,
                     format_fixed(report.accuracy(), 4));
  return out;
}

std::string_view to_string(ErrorBucket b) {
  switch (b) {
    case ErrorBucket::kDatasetCitation: return "dataset_citation";
    case ErrorBucket::kFutureWork: return "future_work";
    case ErrorBucket::kSharedContext: return "shared_context";
    case ErrorBucket::kTableOnly: return "table_only";
    case ErrorBucket::kOther: return "other";
  }
  return "other";
}

std::vector<ErrorRecord> error_report(std::span<const PaperDoc> docs,
                                      std::span<const ReferencePrediction> predictions,
                                      const CueLexicon& lexicon, const FeatureOptions& options) {
  std::map<std::string, const PaperDoc*, std::less<>> by_id;
  for (const auto& d : docs) by_id[d.paper_id] = &d;
  std::vector<ErrorRecord> out;
  for (const auto& p : predictions) {
    auto it = by_id.find(p.paper_id);
    if (it == by_id.end()) throw IntegrityError("prediction for unknown paper " + p.paper_id);
    const PaperDoc& doc = *it->second;
    const Reference* ref = doc.find_reference(p.ref_id);
    if (ref == nullptr) {
      throw IntegrityError("paper " + p.paper_id + ": prediction for unknown reference " + p.ref_id);
    }
    if (ref->label == Label::kUnlabeled || ref->label == p.predicted) continue;

    ErrorRecord rec;
    rec.paper_id = p.paper_id;
    rec.ref_id = p.ref_id;
    rec.gold = ref->label;
    rec.predicted = p.predicted;
    rec.prob_baseline = p.prob_baseline;
    rec.features = compute_features(doc, p.ref_id, lexicon, options);

    bool prose = false;
    bool table = false;
    bool conclusion = false;
    for (const auto& m : doc.mentions) {
      if (m.ref_id != p.ref_id) continue;
      (m.in_table ? table : prose) = true;
      conclusion = conclusion || doc.sections[static_cast<std::size_t>(m.section_index)].category ==
                                     SectionCategory::kConclusion;
    }
    bool dataset = false;
    bool shared = false;
    if (auto rep = representative_mention(doc, p.ref_id)) {
      const CitationMention& m = doc.mentions[*rep];
      const Sentence& sent = doc.sentence_of(m);
      for (const auto& t : sent) {
        if (!rec.citation_sentence.empty()) rec.citation_sentence.push_back(' ');
        rec.citation_sentence += t;
      }
      rec.section = std::string(to_string(doc.sections[static_cast<std::size_t>(m.section_index)].category));
      for (const auto& t : extract_window(doc, m, options.window).flattened()) {
        const std::string s = stem(t);
        if (s == "dataset" || s == "corpu" || s == "corpora") dataset = true;
      }
      std::set<std::string_view> cited;
      for (const auto& other : doc.mentions) {
        if (other.section_index == m.section_index && other.paragraph_index == m.paragraph_index &&
            other.sentence_index == m.sentence_index) {
          cited.insert(other.ref_id);
        }
      }
      shared = cited.size() >= 2;
    }
    if (dataset) rec.buckets.push_back(ErrorBucket::kDatasetCitation);
    if (conclusion) rec.buckets.push_back(ErrorBucket::kFutureWork);
    if (shared) rec.buckets.push_back(ErrorBucket::kSharedContext);
    if (table && !prose) rec.buckets.push_back(ErrorBucket::kTableOnly);
    if (rec.buckets.empty()) rec.buckets.push_back(ErrorBucket::kOther);
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string bucket_list(const std::vector<ErrorBucket>& buckets) {
  std::string out;
  for (ErrorBucket b : buckets) {
    if (!out.empty()) out.push_back(';');
    out += to_string(b);
  }
  return out;
}

}  // namespace

std::string error_report_csv(std::span<const ErrorRecord> records) {
  std::string out =
      "paper_id,ref_id,gold,predicted,prob_baseline,section,buckets,section_counts,in_table,"
      "citation_count_feature,active_cues,citation_sentence\n";
  const auto& lex = CueLexicon::defaults();
  for (const auto& r : records) {
    std::string counts;
    for (int c : r.features.section_counts) {
      if (!counts.empty()) counts.push_back(' ');
      counts += std::to_string(c);
    }
    std::string cues;
    for (std::size_t i = 0; i < kNumCueWords; ++i) {
      if (r.features.cue_weights[i] <= 0.0) continue;
      if (!cues.empty()) cues.push_back(' ');
      cues += fmt::format("{}={:.4g}", lex.stems()[i], r.features.cue_weights[i]);
    }
    out += fmt::format("{},{},{},{},{:.6f},{},{},{},{},{:.6f},{},{}\n", csv_quote(r.paper_id),
                       csv_quote(r.ref_id), to_string(r.gold), to_string(r.predicted),
                       r.prob_baseline, r.section.empty() ? "none" : r.section,
                       bucket_list(r.buckets), counts, r.features.in_table ? 1 : 0,
                       r.features.citation_count_feature, csv_quote(cues),
                       csv_quote(r.citation_sentence));
  }
  return out;
}

std::string error_report_text(std::span<const ErrorRecord> records) {
  std::map<ErrorBucket, std::size_t> tally;
  std::size_t fp = 0;
  for (const auto& r : records) {
    for (ErrorBucket b : r.buckets) ++tally[b];
    fp += r.predicted == Label::kBaseline ? 1 : 0;
  }
  std::string out = fmt::format("{} errors ({} false positives, {} false negatives)\n",
                                records.size(), fp, records.size() - fp);
  for (ErrorBucket b : {ErrorBucket::kDatasetCitation, ErrorBucket::kFutureWork,
                        ErrorBucket::kSharedContext, ErrorBucket::kTableOnly, ErrorBucket::kOther}) {
    out += fmt::format("  {:<18}{:>6}\n", to_string(b), tally[b]);
  }
  for (const auto& r : records) {
    out += fmt::format("\n[{}] {} / {}  gold={} predicted={} p={:.3f}  section={}\n  {}\n",
                       bucket_list(r.buckets), r.paper_id, r.ref_id, to_string(r.gold),
                       to_string(r.predicted), r.prob_baseline,
                       r.section.empty() ? "none" : r.section,
                       r.citation_sentence.empty() ? "(no in-text mention)" : r.citation_sentence);
  }
  return out;
}

}  // namespace bscope
