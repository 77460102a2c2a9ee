#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bscope/types.h"

namespace bscope {

// Reserved filler for padded cells; never matches a cue word.
inline constexpr std::string_view kPadToken = "[PAD]";

struct WindowShape {
  int rows = 10;
  int cols = 50;

  friend bool operator==(const WindowShape&, const WindowShape&) = default;
};

// Fixed-size citation context drawn from one paragraph. Row-major cells.
struct ContextWindow {
  WindowShape shape;
  std::vector<std::string> tokens;  // rows * cols
  std::vector<bool> mask;           // true = real token
  int citation_row = 0;
  // Column of the mention token in citation_row, clamped to the last kept
  // column when the mention fell past the pruning cut.
  int mention_col = 0;
  // Paragraph sentence index of each row, -1 for padding rows.
  std::vector<int> source_sentence;

  const std::string& at(int row, int col) const {
    return tokens[static_cast<std::size_t>(row * shape.cols + col)];
  }
  bool real(int row, int col) const {
    return mask[static_cast<std::size_t>(row * shape.cols + col)];
  }
  bool row_real(int row) const { return real(row, 0); }
  int real_rows() const;
  int row_length(int row) const;

  // Unmasked tokens in row-major order.
  std::vector<std::string> flattened() const;
  // Index of the mention within flattened().
  int mention_position() const;

  // Tab-separated tokens, one line per row, padding shown as kPadToken.
  std::string dump() const;
};

// Throws IntegrityError when the mention does not address a sentence or
// its token_offset lies outside that sentence.
void check_mention(const PaperDoc& doc, const CitationMention& mention);

// Up to `shape.rows` sentences of the mention's paragraph, with the citation
// sentence preceded by (rows-1)/2 sentences when available and the block
// shifted toward the paragraph edge otherwise. Mentions inside a table
// region yield a single-row window.
ContextWindow extract_window(const PaperDoc& doc,
                             const CitationMention& mention,
                             WindowShape shape = {});

const Sentence& citation_sentence(const PaperDoc& doc,
                                  const CitationMention& mention);

}  // namespace bscope
