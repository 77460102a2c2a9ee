#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bscope/features.h"
#include "bscope/mma/config.h"
#include "bscope/mma/model.h"
#include "bscope/types.h"

namespace bscope::mma {

struct LabeledExample {
  std::string paper_id;
  std::string ref_id;
  Label label = Label::kUnlabeled;
  ExampleInput input;
};

// One example per reference of every document whose split matches `split`
// (all documents when nullopt), in document then bibliography order. The
// representative mention supplies the window and citation sentence.
std::vector<LabeledExample> collect_examples(std::span<const PaperDoc> docs,
                                             const CueLexicon& lexicon,
                                             const MmaConfig& config,
                                             std::optional<SplitTag> split = std::nullopt);

ExampleInput build_input(const PaperDoc& doc, std::string_view ref_id,
                         const CueLexicon& lexicon, const MmaConfig& config);

}  // namespace bscope::mma
