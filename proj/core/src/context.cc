#include "bscope/context.h"

#include <algorithm>

#include "bscope/error.h"

namespace bscope {

int ContextWindow::real_rows() const {
  int n = 0;
  for (int r = 0; r < shape.rows; ++r) n += row_real(r) ? 1 : 0;
  return n;
}

int ContextWindow::row_length(int row) const {
  int n = 0;
  while (n < shape.cols && real(row, n)) ++n;
  return n;
}

std::vector<std::string> ContextWindow::flattened() const {
  std::vector<std::string> out;
  for (int r = 0; r < shape.rows; ++r) {
    for (int c = 0; c < shape.cols; ++c) {
      if (real(r, c)) out.push_back(at(r, c));
    }
  }
  return out;
}

int ContextWindow::mention_position() const {
  int pos = 0;
  for (int r = 0; r < citation_row; ++r) pos += row_length(r);
  return pos + mention_col;
}

std::string ContextWindow::dump() const {
  std::string out;
  for (int r = 0; r < shape.rows; ++r) {
    for (int c = 0; c < shape.cols; ++c) {
      if (c > 0) out.push_back('\t');
      out += real(r, c) ? at(r, c) : std::string(kPadToken);
    }
    out.push_back('\n');
  }
  return out;
}

void check_mention(const PaperDoc& doc, const CitationMention& m) {
  auto fail = [&](const std::string& what) {
    throw IntegrityError("paper " + doc.paper_id + ": mention of " + m.ref_id + ": " + what);
  };
  if (m.section_index < 0 || m.section_index >= static_cast<int>(doc.sections.size())) {
    fail("section_index out of range");
  }
  const Section& s = doc.sections[static_cast<std::size_t>(m.section_index)];
  if (m.paragraph_index < 0 || m.paragraph_index >= static_cast<int>(s.paragraphs.size())) {
    fail("paragraph_index out of range");
  }
  const Paragraph& p = s.paragraphs[static_cast<std::size_t>(m.paragraph_index)];
  if (m.sentence_index < 0 || m.sentence_index >= static_cast<int>(p.size())) {
    fail("sentence_index out of range");
  }
  const Sentence& sent = p[static_cast<std::size_t>(m.sentence_index)];
  if (m.token_offset < 0 || m.token_offset >= static_cast<int>(sent.size())) {
    fail("token_offset " + std::to_string(m.token_offset) + " beyond sentence of " +
         std::to_string(sent.size()) + " tokens");
  }
}

ContextWindow extract_window(const PaperDoc& doc, const CitationMention& mention,
                             WindowShape shape) {
  if (shape.rows < 1 || shape.cols < 1) throw InvalidArgument("window shape must be positive");
  check_mention(doc, mention);
  const Section& section = doc.sections[static_cast<std::size_t>(mention.section_index)];
  const Paragraph& para = section.paragraphs[static_cast<std::size_t>(mention.paragraph_index)];

  ContextWindow w;
  w.shape = shape;
  const auto cells = static_cast<std::size_t>(shape.rows * shape.cols);
  w.tokens.assign(cells, std::string(kPadToken));
  w.mask.assign(cells, false);
  w.source_sentence.assign(static_cast<std::size_t>(shape.rows), -1);

  const int n = static_cast<int>(para.size());
  const int cite = mention.sentence_index;
  int first = cite;
  int count = 1;
  if (!section.is_table(mention.paragraph_index, cite)) {
    const int before = (shape.rows - 1) / 2;
    first = std::clamp(cite - before, 0, std::max(0, n - shape.rows));
    count = std::min(n, shape.rows);
  }
  for (int r = 0; r < count; ++r) {
    const int si = first + r;
    const Sentence& sent = para[static_cast<std::size_t>(si)];
    const int len = std::min(static_cast<int>(sent.size()), shape.cols);
    for (int c = 0; c < len; ++c) {
      const auto idx = static_cast<std::size_t>(r * shape.cols + c);
      w.tokens[idx] = sent[static_cast<std::size_t>(c)];
      w.mask[idx] = true;
    }
    w.source_sentence[static_cast<std::size_t>(r)] = si;
  }
  w.citation_row = cite - first;
  w.mention_col = std::min(mention.token_offset, shape.cols - 1);
  return w;
}

const Sentence& citation_sentence(const PaperDoc& doc, const CitationMention& mention) {
  check_mention(doc, mention);
  return doc.sentence_of(mention);
}

}  // namespace bscope
