#include "bscope/features.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "bscope/error.h"
#include "bscope/rng.h"
#include "bscope/stemmer.h"

namespace bscope {

const CueLexicon& CueLexicon::defaults() {
  static const CueLexicon lexicon({
      "among",   "base",       "origin",   "precis",    "modifi",
      "highest", "implement",  "extend",   "signific",  "maximum",
      "metric",  "higher",     "experi",   "baselin",   "fscore",
      "strategi", "accord",    "compar",   "overal",    "perform",
      "best",    "previou",    "model",    "evalu",     "correl",
      "recal",   "result",     "calcul",   "standard",  "stateoftheart",
      "achiev",  "figur",      "accuraci", "gold",      "comparison",
      "method",  "top",        "yield",    "procedur",  "obtain",
      "outperform", "score",   "significantli", "increas", "report",
  });
  return lexicon;
}

CueLexicon::CueLexicon(std::vector<std::string> stems) : stems_(std::move(stems)) {
  if (stems_.size() != kNumCueWords) {
    throw InvalidArgument("cue lexicon needs exactly " + std::to_string(kNumCueWords) +
                          " stems, got " + std::to_string(stems_.size()));
  }
  std::set<std::string_view> seen;
  for (const auto& s : stems_) {
    if (s.empty()) throw InvalidArgument("empty cue stem");
    for (char c : s) {
      if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) {
        throw InvalidArgument("cue stem '" + s + "' is not lowercase alphanumeric");
      }
    }
    if (!seen.insert(s).second) throw InvalidArgument("duplicate cue stem '" + s + "'");
  }
}

CueLexicon CueLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> stems;
  std::string word;
  while (in >> word) stems.push_back(word);
  try {
    return CueLexicon(std::move(stems));
  } catch (const InvalidArgument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

int CueLexicon::index_of(std::string_view stem) const {
  for (std::size_t i = 0; i < stems_.size(); ++i) {
    if (stems_[i] == stem) return static_cast<int>(i);
  }
  return -1;
}

std::string CueLexicon::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : stems_) {
    h = fnv1a64(s.data(), s.size(), h);
    h = fnv1a64("\n", 1, h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::array<double, kFeatureDim> FeatureVector::flatten() const {
  std::array<double, kFeatureDim> out{};
  std::size_t i = 0;
  for (int c : section_counts) out[i++] = static_cast<double>(c);
  out[i++] = in_table ? 1.0 : 0.0;
  for (double w : cue_weights) out[i++] = w;
  out[i] = citation_count_feature;
  return out;
}

LocationFeatures location_features(const PaperDoc& doc, std::string_view ref_id) {
  if (doc.find_reference(ref_id) == nullptr) {
    throw InvalidArgument("paper " + doc.paper_id + ": unknown reference " + std::string(ref_id));
  }
  LocationFeatures out;
  for (const auto& m : doc.mentions) {
    if (m.ref_id != ref_id) continue;
    const auto c = doc.sections[static_cast<std::size_t>(m.section_index)].category;
    ++out.section_counts[static_cast<std::size_t>(c)];
    out.in_table = out.in_table || m.in_table;
  }
  return out;
}

std::array<double, kNumCueWords> cue_weights(const ContextWindow& window,
                                             const CueLexicon& lexicon) {
  std::array<double, kNumCueWords> out{};
  const int mention = window.mention_position();
  int pos = 0;
  for (int r = 0; r < window.shape.rows; ++r) {
    for (int c = 0; c < window.shape.cols; ++c) {
      if (!window.real(r, c)) continue;
      const std::string& token = window.at(r, c);
      const int here = pos++;
      if (token == kPadToken) continue;
      const int idx = lexicon.index_of(stem(token));
      if (idx < 0) continue;
      const int d = std::max(1, std::abs(here - mention));
      out[static_cast<std::size_t>(idx)] =
          std::max(out[static_cast<std::size_t>(idx)], 1.0 / static_cast<double>(d));
    }
  }
  return out;
}

double citation_count_feature(std::optional<std::int64_t> count, CountTransform transform) {
  if (!count) return 0.0;
  const double c = static_cast<double>(std::max<std::int64_t>(0, *count));
  return transform == CountTransform::kLog1p ? std::log1p(c) : c;
}

std::optional<std::size_t> representative_mention(const PaperDoc& doc,
                                                  std::string_view ref_id) {
  auto rank = [](SectionCategory c) {
    switch (c) {
      case SectionCategory::kMethodsResults: return 0;
      case SectionCategory::kOther: return 1;
      case SectionCategory::kRelated: return 2;
      case SectionCategory::kIntroduction: return 3;
      case SectionCategory::kConclusion: return 4;
    }
    return 5;
  };
  std::optional<std::size_t> best;
  std::pair<int, int> best_key{};
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const auto& m = doc.mentions[i];
    if (m.ref_id != ref_id) continue;
    const std::pair<int, int> key{
        rank(doc.sections[static_cast<std::size_t>(m.section_index)].category),
        m.in_table ? 1 : 0};
    if (!best || key < best_key) {
      best = i;
      best_key = key;
    }
  }
  return best;
}

FeatureVector compute_features(const PaperDoc& doc, std::string_view ref_id,
                               const CueLexicon& lexicon, const FeatureOptions& options) {
  const Reference* ref = doc.find_reference(ref_id);
  if (ref == nullptr) {
    throw InvalidArgument("paper " + doc.paper_id + ": unknown reference " + std::string(ref_id));
  }
  FeatureVector fv;
  const LocationFeatures loc = location_features(doc, ref_id);
  fv.section_counts = loc.section_counts;
  fv.in_table = loc.in_table;
  if (auto rep = representative_mention(doc, ref_id)) {
    fv.cue_weights = cue_weights(extract_window(doc, doc.mentions[*rep], options.window), lexicon);
  }
  fv.citation_count_feature = citation_count_feature(ref->citation_count, options.count_transform);
  return fv;
}

}  // namespace bscope
