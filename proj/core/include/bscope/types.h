#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bscope {

using Tokens = std::vector<std::string>;
using Sentence = Tokens;
using Paragraph = std::vector<Sentence>;

// The five heading buckets, in feature order.
enum class SectionCategory : std::uint8_t {
  kIntroduction = 0,
  kRelated = 1,
  kMethodsResults = 2,
  kConclusion = 3,
  kOther = 4,
};
inline constexpr std::size_t kNumSectionCategories = 5;
inline constexpr std::array<SectionCategory, kNumSectionCategories>
    kAllSectionCategories = {
        SectionCategory::kIntroduction, SectionCategory::kRelated,
        SectionCategory::kMethodsResults, SectionCategory::kConclusion,
        SectionCategory::kOther};

enum class Label : std::uint8_t { kBaseline, kNonBaseline, kUnlabeled };

enum class SplitTag : std::uint8_t { kTrain, kDev, kTest, kUnassigned };

std::string_view to_string(SectionCategory c);
std::string_view to_string(Label l);
std::string_view to_string(SplitTag s);

// Each throws ParseError on an unknown name.
SectionCategory parse_section_category(std::string_view s);
Label parse_label(std::string_view s);
SplitTag parse_split_tag(std::string_view s);

struct TableRegion {
  int paragraph_index = 0;
  int sentence_index = 0;

  friend bool operator==(const TableRegion&, const TableRegion&) = default;
  friend auto operator<=>(const TableRegion&, const TableRegion&) = default;
};

struct Section {
  std::string heading;
  SectionCategory category = SectionCategory::kOther;
  std::vector<Paragraph> paragraphs;
  std::vector<TableRegion> table_regions;

  bool is_table(int paragraph_index, int sentence_index) const;

  friend bool operator==(const Section&, const Section&) = default;
};

struct Reference {
  std::string ref_id;
  std::string raw_string;
  std::string cited_title;
  std::optional<int> cited_year;
  // Global citations received by the cited paper, when known.
  std::optional<std::int64_t> citation_count;
  Label label = Label::kUnlabeled;

  friend bool operator==(const Reference&, const Reference&) = default;
};

struct CitationMention {
  std::string ref_id;
  int section_index = 0;
  int paragraph_index = 0;
  int sentence_index = 0;
  int token_offset = 0;
  bool in_table = false;

  friend bool operator==(const CitationMention&,
                         const CitationMention&) = default;
};

struct PaperDoc {
  std::string paper_id;
  Tokens title;
  Tokens abstract;
  std::string venue;
  int year = 2000;
  std::vector<Section> sections;
  std::vector<Reference> references;
  std::vector<CitationMention> mentions;
  SplitTag split_tag = SplitTag::kUnassigned;

  const Reference* find_reference(std::string_view ref_id) const;
  Reference* find_reference(std::string_view ref_id);

  // Sentence addressed by a mention. Caller guarantees validity.
  const Sentence& sentence_of(const CitationMention& m) const;

  // True when every reference carries a baseline/non-baseline label.
  bool is_annotated() const;

  friend bool operator==(const PaperDoc&, const PaperDoc&) = default;
};

}  // namespace bscope
