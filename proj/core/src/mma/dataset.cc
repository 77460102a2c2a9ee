#include "bscope/mma/dataset.h"

#include <fmt/format.h>

#include "bscope/context.h"
#include "bscope/error.h"

namespace bscope::mma {

ExampleInput build_input(const PaperDoc& doc, std::string_view ref_id,
                         const CueLexicon& lexicon, const MmaConfig& config) {
  ExampleInput in;
  in.features = compute_features(doc, ref_id, lexicon, config.feature_options());
  const auto rep = representative_mention(doc, ref_id);
  in.has_mention = rep.has_value();
  if (!rep) return in;
  const CitationMention& m = doc.mentions[*rep];
  in.window = extract_window(doc, m, config.window());
  in.citation_sentence = citation_sentence(doc, m);
  in.title_abstract = doc.title;
  in.title_abstract.insert(in.title_abstract.end(), doc.abstract.begin(), doc.abstract.end());
  if (in.title_abstract.empty()) {
    throw IntegrityError(fmt::format("paper '{}' has neither title nor abstract", doc.paper_id));
  }
  return in;
}

std::vector<LabeledExample> collect_examples(std::span<const PaperDoc> docs,
                                             const CueLexicon& lexicon,
                                             const MmaConfig& config,
                                             std::optional<SplitTag> split) {
  std::vector<LabeledExample> out;
  for (const PaperDoc& doc : docs) {
    if (split && doc.split_tag != *split) continue;
    for (const Reference& ref : doc.references) {
      LabeledExample ex;
      ex.paper_id = doc.paper_id;
      ex.ref_id = ref.ref_id;
      ex.label = ref.label;
      ex.input = build_input(doc, ref.ref_id, lexicon, config);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace bscope::mma
