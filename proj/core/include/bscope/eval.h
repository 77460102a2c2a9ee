#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bscope/features.h"
#include "bscope/heuristics.h"
#include "bscope/types.h"

namespace bscope {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 2PR/(P+R), or 0 when P+R = 0.
double f1_score(double precision, double recall);

// Unweighted mean of each metric.
ClassMetrics macro_average(const ClassMetrics& a, const ClassMetrics& b);

struct MetricsReport {
  ClassMetrics baseline;
  ClassMetrics non_baseline;
  ClassMetrics overall;
  ConfusionCounts confusion;  // baseline is the positive class

  std::size_t support() const {
    return confusion.tp + confusion.fp + confusion.fn + confusion.tn;
  }
  double accuracy() const;
};

// Throws InvalidArgument on length mismatch, empty input, or unlabeled
// entries.
MetricsReport compute_metrics(std::span<const Label> gold,
                              std::span<const Label> predicted);

// Machine-readable summary; byte-identical for identical reports.
std::string metrics_json(const MetricsReport& report);
std::string metrics_csv(const MetricsReport& report);
std::string metrics_text(const MetricsReport& report);

struct ReferencePrediction {
  std::string paper_id;
  std::string ref_id;
  Label predicted = Label::kUnlabeled;
  double prob_baseline = 0.0;
};

enum class ErrorBucket : std::uint8_t {
  kDatasetCitation,  // "dataset"/"corpus" in the citation context
  kFutureWork,       // mentioned in a conclusion section
  kSharedContext,    // citation sentence cites two or more references
  kTableOnly,        // only ever cited inside tables
  kOther,            // none of the above
};

std::string_view to_string(ErrorBucket b);

struct ErrorRecord {
  std::string paper_id;
  std::string ref_id;
  Label gold = Label::kUnlabeled;
  Label predicted = Label::kUnlabeled;
  double prob_baseline = 0.0;
  std::string citation_sentence;  // space-joined, empty when unmentioned
  std::string section;            // category of the representative mention
  FeatureVector features;
  std::vector<ErrorBucket> buckets;
};

// Misclassified labeled references with their heuristic buckets. Predictions
// for unknown papers/references throw IntegrityError.
std::vector<ErrorRecord> error_report(std::span<const PaperDoc> docs,
                                      std::span<const ReferencePrediction> predictions,
                                      const CueLexicon& lexicon,
                                      const FeatureOptions& options = {});

std::string error_report_csv(std::span<const ErrorRecord> records);
std::string error_report_text(std::span<const ErrorRecord> records);

}  // namespace bscope
