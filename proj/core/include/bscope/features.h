#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bscope/context.h"
#include "bscope/types.h"

namespace bscope {

inline constexpr std::size_t kNumCueWords = 45;
// 5 section counts + table flag + 45 cue weights + citation count.
inline constexpr std::size_t kFeatureDim = kNumSectionCategories + 1 +
                                           kNumCueWords + 1;

class CueLexicon {
 public:
  // The 45 stems from the baseline-context cue table, in printed order.
  static const CueLexicon& defaults();

  // Throws InvalidArgument unless 45 distinct lowercase stems.
  explicit CueLexicon(std::vector<std::string> stems);

  // Whitespace-separated stems.
  static CueLexicon load(const std::filesystem::path& path);

  const std::vector<std::string>& stems() const { return stems_; }
  // Index of a stem, or -1.
  int index_of(std::string_view stem) const;
  // FNV-1a over the newline-joined stems, as 16 hex digits.
  std::string fingerprint() const;

 private:
  std::vector<std::string> stems_;
};

enum class CountTransform : std::uint8_t { kLog1p, kRaw };

struct FeatureVector {
  std::array<int, kNumSectionCategories> section_counts{};
  bool in_table = false;
  std::array<double, kNumCueWords> cue_weights{};
  double citation_count_feature = 0.0;

  // Flat layout: counts, table flag, cue weights, citation count.
  std::array<double, kFeatureDim> flatten() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct LocationFeatures {
  std::array<int, kNumSectionCategories> section_counts{};
  bool in_table = false;
};

// Mention counts per section category (table mentions count toward the
// section holding the table). Throws InvalidArgument for an unknown ref_id.
LocationFeatures location_features(const PaperDoc& doc,
                                   std::string_view ref_id);

// Weight 1/d per cue stem, d = max(1, distance in tokens from the mention
// over the flattened unmasked window), nearest occurrence wins, 0 if absent.
std::array<double, kNumCueWords> cue_weights(const ContextWindow& window,
                                             const CueLexicon& lexicon);

double citation_count_feature(std::optional<std::int64_t> count,
                              CountTransform transform = CountTransform::kLog1p);

// Mention used to represent a reference with several mentions: section
// priority methods_results > other > related > introduction > conclusion,
// prose before table, then document order. nullopt when never mentioned.
std::optional<std::size_t> representative_mention(const PaperDoc& doc,
                                                  std::string_view ref_id);

struct FeatureOptions {
  WindowShape window;
  CountTransform count_transform = CountTransform::kLog1p;
};

// Full bundle for one reference; cue weights come from the representative
// mention's window (all zero when unmentioned).
FeatureVector compute_features(const PaperDoc& doc, std::string_view ref_id,
                               const CueLexicon& lexicon,
                               const FeatureOptions& options = {});

}  // namespace bscope
