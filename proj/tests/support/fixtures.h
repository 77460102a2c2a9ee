#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bscope/rng.h"
#include "bscope/types.h"

namespace bscope::testing {

// Incremental PaperDoc construction with valid addressing.
class DocBuilder {
 public:
  explicit DocBuilder(std::string paper_id, int year = 2012);

  DocBuilder& title(const std::string& text);
  DocBuilder& abstract(const std::string& text);
  DocBuilder& venue(std::string venue);
  DocBuilder& split(SplitTag tag);

  // Returns the section index; category comes from the heading keywords.
  int section(const std::string& heading);
  // Appends a paragraph of whitespace-tokenized sentences; returns its index.
  int paragraph(int section, const std::vector<std::string>& sentences);
  void mark_table(int section, int paragraph, int sentence);

  DocBuilder& reference(const std::string& ref_id, Label label = Label::kUnlabeled,
                        const std::string& title = {});
  // Mention at `offset` within the addressed sentence; in_table is derived.
  DocBuilder& cite(const std::string& ref_id, int section, int paragraph, int sentence,
                   int offset);

  PaperDoc& doc() { return doc_; }
  // Validates and returns the document.
  PaperDoc build() const;

 private:
  PaperDoc doc_;
};

std::vector<std::string> split_words(const std::string& text);

// Randomized, valid, fully labeled documents with varied sections, tables,
// shared citation sentences and unmentioned references.
PaperDoc random_document(Rng& rng, const std::string& paper_id);
std::vector<PaperDoc> random_corpus(std::size_t n, std::uint64_t seed);

// The 20-paper labeled fixture.
std::vector<PaperDoc> labeled_fixture();

// 20 papers whose baselines/non-baselines are placed so that the experiment
// and table rules land near precision/recall 0.234 / 0.734 (experiment)
// and 0.72 / 0.18 (table).
std::vector<PaperDoc> paper_distribution_fixture();

// 4 papers x 8 references. Every reference has a prose mention in an
// experiments section; exactly the baselines also appear in a results table.
std::vector<PaperDoc> separable_fixture();

// One paper per banned keyword (in title or venue) followed by controls.
struct FilterFixture {
  std::vector<PaperDoc> docs;
  std::vector<std::string> banned_ids;
  std::vector<std::string> control_ids;
};
FilterFixture filter_fixture();

// Two annotators over 40 references.
struct KappaFixture {
  std::vector<Label> a;
  std::vector<Label> b;
};
KappaFixture kappa_fixture();

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "bscope");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bscope::testing
