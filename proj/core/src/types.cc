#include "bscope/types.h"

#include <string>

#include "bscope/error.h"

namespace bscope {

std::string_view to_string(SectionCategory c) {
  switch (c) {
    case SectionCategory::kIntroduction: return "introduction";
    case SectionCategory::kRelated: return "related";
    case SectionCategory::kMethodsResults: return "methods_results";
    case SectionCategory::kConclusion: return "conclusion";
    case SectionCategory::kOther: return "other";
  }
  return "other";
}

std::string_view to_string(Label l) {
  switch (l) {
    case Label::kBaseline: return "baseline";
    case Label::kNonBaseline: return "non_baseline";
    case Label::kUnlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::string_view to_string(SplitTag s) {
  switch (s) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kDev: return "dev";
    case SplitTag::kTest: return "test";
    case SplitTag::kUnassigned: return "unassigned";
  }
  return "unassigned";
}

SectionCategory parse_section_category(std::string_view s) {
  for (SectionCategory c : kAllSectionCategories) {
    if (to_string(c) == s) return c;
  }
  throw ParseError("unknown section category '" + std::string(s) + "'");
}

Label parse_label(std::string_view s) {
  for (Label l : {Label::kBaseline, Label::kNonBaseline, Label::kUnlabeled}) {
    if (to_string(l) == s) return l;
  }
  throw ParseError("unknown label '" + std::string(s) + "'");
}

SplitTag parse_split_tag(std::string_view s) {
  for (SplitTag t :
       {SplitTag::kTrain, SplitTag::kDev, SplitTag::kTest, SplitTag::kUnassigned}) {
    if (to_string(t) == s) return t;
  }
  throw ParseError("unknown split tag '" + std::string(s) + "'");
}

bool Section::is_table(int paragraph_index, int sentence_index) const {
  for (const auto& r : table_regions) {
    if (r.paragraph_index == paragraph_index &&
        r.sentence_index == sentence_index) {
      return true;
    }
  }
  return false;
}

const Reference* PaperDoc::find_reference(std::string_view ref_id) const {
  for (const auto& r : references) {
    if (r.ref_id == ref_id) return &r;
  }
  return nullptr;
}

Reference* PaperDoc::find_reference(std::string_view ref_id) {
  for (auto& r : references) {
    if (r.ref_id == ref_id) return &r;
  }
  return nullptr;
}

const Sentence& PaperDoc::sentence_of(const CitationMention& m) const {
  return sections[static_cast<std::size_t>(m.section_index)]
      .paragraphs[static_cast<std::size_t>(m.paragraph_index)]
                 [static_cast<std::size_t>(m.sentence_index)];
}

bool PaperDoc::is_annotated() const {
  if (references.empty()) return false;
  for (const auto& r : references) {
    if (r.label == Label::kUnlabeled) return false;
  }
  return true;
}

}  // namespace bscope
