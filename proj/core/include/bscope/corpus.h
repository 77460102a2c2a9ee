#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bscope/types.h"

namespace bscope {

inline constexpr std::string_view kCorpusSchemaVersion = "baseline-corpus/1";
inline constexpr std::string_view kManifestFileName = "manifest.json";

// Checks every PaperDoc invariant. Throws IntegrityError naming the paper
// and the offending field.
void validate_document(const PaperDoc& doc);

// Serialized form of one paper (UTF-8 JSON, two-space indent, trailing
// newline). Identical documents always serialize to identical bytes.
std::string serialize_document(const PaperDoc& doc);

// Throws ParseError (schema) or IntegrityError (dangling references, bad
// indices). `origin` is used in diagnostics only.
PaperDoc parse_document(std::string_view text, std::string_view origin = {});

// Reads a corpus directory: `manifest.json` listing one file per paper.
// An empty directory yields an empty corpus.
std::vector<PaperDoc> load_corpus(const std::filesystem::path& dir);

// Writes `manifest.json` plus `<paper_id>.json` per document. Paper ids must
// be unique. Throws IoError when the directory cannot be written.
void write_corpus(const std::filesystem::path& dir,
                  std::span<const PaperDoc> docs);

// Lowercased substrings that mark a paper as not a full research paper.
const std::vector<std::string>& default_filter_keywords();

struct FilterResult {
  std::vector<PaperDoc> kept;
  std::vector<PaperDoc> discarded;
};

// Case-insensitive match over title and venue; a keyword must start at a
// word boundary and may run into a longer word ("demo" hits
// "demonstrations"). Order preserved.
FilterResult filter_papers(std::vector<PaperDoc> docs);
FilterResult filter_papers(std::vector<PaperDoc> docs,
                           std::span<const std::string> keywords);

// The keyword that causes `doc` to be discarded, or empty when kept.
std::string matched_filter_keyword(const PaperDoc& doc,
                                   std::span<const std::string> keywords);

struct SplitSpec {
  std::array<double, 3> ratios = {0.70, 0.10, 0.20};  // train, dev, test
  std::uint64_t seed = 0;
};

// Whole-paper split. Counts are the largest-remainder apportionment of
// n * ratios, so each split is within one paper of its exact share.
// Throws InvalidArgument for fewer than 3 papers, invalid ratios, or docs
// already assigned.
std::vector<PaperDoc> assign_splits(std::vector<PaperDoc> docs,
                                    const SplitSpec& spec);

// Per-split paper counts as produced by assign_splits.
std::array<std::size_t, 3> split_counts(std::size_t n, const SplitSpec& spec);

// Cohen's kappa between two annotators. Throws InvalidArgument on length
// mismatch or empty input. Two identical constant sequences give 1.
double cohens_kappa(std::span<const Label> labels_a,
                    std::span<const Label> labels_b);

struct Annotation {
  std::string paper_id;
  std::string ref_id;
  Label label = Label::kUnlabeled;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// Overlay file: one `paper_id<TAB>ref_id<TAB>label` line per annotation.
std::vector<Annotation> read_annotations(const std::filesystem::path& path);
void write_annotations(const std::filesystem::path& path,
                       std::span<const Annotation> annotations);
std::vector<Annotation> parse_annotations(std::string_view text);
std::string serialize_annotations(std::span<const Annotation> annotations);

// Sets labels from an overlay. Throws IntegrityError for annotations naming
// an unknown paper or reference.
void apply_annotations(std::vector<PaperDoc>& docs,
                       std::span<const Annotation> annotations);

// Labels of every labeled reference, as annotation triples.
std::vector<Annotation> extract_annotations(std::span<const PaperDoc> docs);

}  // namespace bscope
