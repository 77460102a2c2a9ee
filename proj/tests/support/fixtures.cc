#include "fixtures.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "bscope/corpus.h"
#include "bscope/sectionmap.h"

namespace bscope::testing {

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

DocBuilder::DocBuilder(std::string paper_id, int year) {
  doc_.paper_id = std::move(paper_id);
  doc_.year = year;
  doc_.title = split_words("A study of " + doc_.paper_id);
  doc_.venue = "Proceedings of ACL";
}

DocBuilder& DocBuilder::title(const std::string& text) {
  doc_.title = split_words(text);
  return *this;
}

DocBuilder& DocBuilder::abstract(const std::string& text) {
  doc_.abstract = split_words(text);
  return *this;
}

DocBuilder& DocBuilder::venue(std::string venue) {
  doc_.venue = std::move(venue);
  return *this;
}

DocBuilder& DocBuilder::split(SplitTag tag) {
  doc_.split_tag = tag;
  return *this;
}

int DocBuilder::section(const std::string& heading) {
  Section s;
  s.heading = heading;
  s.category = categorize_heading(heading);
  doc_.sections.push_back(std::move(s));
  return static_cast<int>(doc_.sections.size()) - 1;
}

int DocBuilder::paragraph(int section, const std::vector<std::string>& sentences) {
  Paragraph p;
  for (const auto& s : sentences) p.push_back(split_words(s));
  auto& paras = doc_.sections.at(static_cast<std::size_t>(section)).paragraphs;
  paras.push_back(std::move(p));
  return static_cast<int>(paras.size()) - 1;
}

void DocBuilder::mark_table(int section, int paragraph, int sentence) {
  doc_.sections.at(static_cast<std::size_t>(section)).table_regions.push_back({paragraph, sentence});
}

DocBuilder& DocBuilder::reference(const std::string& ref_id, Label label,
                                  const std::string& title) {
  Reference r;
  r.ref_id = ref_id;
  r.raw_string = fmt::format("Author. {}. Venue.", title.empty() ? "Cited work " + ref_id : title);
  r.cited_title = title.empty() ? "Cited work " + ref_id : title;
  r.cited_year = 2005;
  r.label = label;
  doc_.references.push_back(std::move(r));
  return *this;
}

DocBuilder& DocBuilder::cite(const std::string& ref_id, int section, int paragraph, int sentence,
                             int offset) {
  CitationMention m;
  m.ref_id = ref_id;
  m.section_index = section;
  m.paragraph_index = paragraph;
  m.sentence_index = sentence;
  m.token_offset = offset;
  m.in_table = doc_.sections.at(static_cast<std::size_t>(section)).is_table(paragraph, sentence);
  doc_.mentions.push_back(std::move(m));
  return *this;
}

PaperDoc DocBuilder::build() const {
  validate_document(doc_);
  return doc_;
}

namespace {

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "we",        "compare",  "against",    "the",       "baseline", "results",  "show",
      "that",      "our",      "method",     "outperforms", "dataset", "corpus",  "model",
      "accuracy",  "score",    "previous",   "work",      "propose",  "approach", "in",
      "of",        "and",      "is",         "a",         "for",      "on",       "with",
      "task",      "data",     "system",     "parser",    "features", "training", "best",
      "performance", "evaluation", "report", "significantly", "higher", "study",  "recall",
      "precision", "standard", "state-of-the-art", "obtained", "top",   "yields",  "gold"};
  return words;
}

const std::vector<std::string>& headings() {
  static const std::vector<std::string> h = {
      "Related Work",   "Background",         "Experiments",   "Results and Analysis",
      "Our Approach",   "Data",               "Evaluation",    "Acknowledgments",
      "Error Analysis", "Conclusion",         "Conclusions and Future Work"};
  return h;
}

std::string random_sentence(Rng& rng, int min_len, int max_len) {
  const auto& v = vocabulary();
  const int len = min_len + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len - min_len + 1)));
  std::string s;
  for (int i = 0; i < len; ++i) {
    if (i) s.push_back(' ');
    s += v[rng.below(v.size())];
  }
  return s;
}

struct Slot {
  int section;
  int paragraph;
  int sentence;
};

}  // namespace

PaperDoc random_document(Rng& rng, const std::string& paper_id) {
  DocBuilder b(paper_id, 1995 + static_cast<int>(rng.below(21)));
  b.title(random_sentence(rng, 3, 8));
  b.abstract(random_sentence(rng, 8, 20));
  const int n_sections = 3 + static_cast<int>(rng.below(4));
  std::vector<std::string> chosen = {"Introduction"};
  for (int i = 1; i < n_sections; ++i) chosen.push_back(headings()[rng.below(headings().size())]);

  std::vector<Slot> prose;
  std::vector<Slot> tables;
  std::vector<Slot> methods;
  for (const auto& heading : chosen) {
    const int s = b.section(heading);
    const int n_par = 1 + static_cast<int>(rng.below(3));
    for (int p = 0; p < n_par; ++p) {
      std::vector<std::string> sentences;
      const int n_sent = 1 + static_cast<int>(rng.below(7));
      for (int k = 0; k < n_sent; ++k) sentences.push_back(random_sentence(rng, 4, 18));
      b.paragraph(s, sentences);
      for (int k = 0; k < n_sent; ++k) {
        const bool table = rng.uniform() < 0.12;
        if (table) b.mark_table(s, p, k);
        (table ? tables : prose).push_back({s, p, k});
        if (!table && b.doc().sections[static_cast<std::size_t>(s)].category ==
                          SectionCategory::kMethodsResults) {
          methods.push_back({s, p, k});
        }
      }
    }
  }

  const int n_refs = 4 + static_cast<int>(rng.below(9));
  for (int r = 0; r < n_refs; ++r) {
    const std::string id = fmt::format("r{}", r);
    const Label label = rng.uniform() < 0.3 ? Label::kBaseline : Label::kNonBaseline;
    b.reference(id, label);
    if (rng.uniform() < 0.5) b.doc().references.back().citation_count = static_cast<std::int64_t>(rng.below(5000));
    const int n_mentions = rng.uniform() < 0.08 ? 0 : 1 + static_cast<int>(rng.below(3));
    for (int m = 0; m < n_mentions; ++m) {
      const std::vector<Slot>* pool = &prose;
      const double u = rng.uniform();
      if (label == Label::kBaseline) {
        if (u < 0.3 && !tables.empty()) pool = &tables;
        else if (u < 0.8 && !methods.empty()) pool = &methods;
      } else if (u < 0.05 && !tables.empty()) {
        pool = &tables;
      }
      const Slot slot = (*pool)[rng.below(pool->size())];
      auto& sent = b.doc()
                       .sections[static_cast<std::size_t>(slot.section)]
                       .paragraphs[static_cast<std::size_t>(slot.paragraph)]
                       [static_cast<std::size_t>(slot.sentence)];
      const int offset = static_cast<int>(rng.below(sent.size()));
      sent[static_cast<std::size_t>(offset)] = "@" + id;
      b.cite(id, slot.section, slot.paragraph, slot.sentence, offset);
    }
  }
  return b.build();
}

std::vector<PaperDoc> random_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PaperDoc> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_document(rng, fmt::format("P{:03}", i)));
  return out;
}

std::vector<PaperDoc> labeled_fixture() { return random_corpus(20, 20200713); }

std::vector<PaperDoc> paper_distribution_fixture() {
  constexpr int kPapers = 20;
  constexpr int kBaselines = 5;
  constexpr int kOthers = 30;
  std::vector<PaperDoc> out;
  for (int p = 0; p < kPapers; ++p) {
    DocBuilder b(fmt::format("D{:02}", p), 2011);
    b.abstract("we study a task and compare with prior systems");
    const int intro = b.section("Introduction");
    const int related = b.section("Related Work");
    const int exp = b.section("Experiments");
    b.section("Conclusion");
    std::vector<std::string> intro_s, related_s, exp_s, table_s;
    std::vector<std::pair<std::string, int>> intro_c, related_c, exp_c, table_c;
    auto place = [](std::vector<std::string>& sents, std::vector<std::pair<std::string, int>>& cites,
                    const std::string& id, const std::string& text) {
      sents.push_back(text + " @" + id);
      cites.emplace_back(id, static_cast<int>(sents.size()) - 1);
    };
    for (int k = 0; k < kBaselines + kOthers; ++k) {
      const bool baseline = k < kBaselines;
      const int g = baseline ? p * kBaselines + k : p * kOthers + (k - kBaselines);
      const std::string id = fmt::format("r{}", k);
      b.reference(id, baseline ? Label::kBaseline : Label::kNonBaseline);
      // A coprime multiplier permutes the global index, so the quotas are
      // exact and spread over papers. Table mentions are a subset of the
      // experiment mentions.
      const int rank = baseline ? (g * 37) % 100 : (g * 7) % 600;
      const bool in_exp = rank < (baseline ? 73 : 240);
      const bool in_table = rank < (baseline ? 18 : 7);
      if (g % 2 == 0) place(intro_s, intro_c, id, "prior work includes");
      else place(related_s, related_c, id, "related systems include");
      if (in_exp) place(exp_s, exp_c, id, "we compare with");
      if (in_table) place(table_s, table_c, id, "87.1 85.3");
    }
    auto emit = [&](int section, std::vector<std::string>& sents,
                    const std::vector<std::pair<std::string, int>>& cites, bool table) {
      if (sents.empty()) return;
      const int par = b.paragraph(section, sents);
      for (std::size_t i = 0; i < sents.size(); ++i) {
        if (table) b.mark_table(section, par, static_cast<int>(i));
      }
      for (const auto& [id, sent] : cites) {
        b.cite(id, section, par, sent,
               static_cast<int>(split_words(sents[static_cast<std::size_t>(sent)]).size()) - 1);
      }
    };
    emit(intro, intro_s, intro_c, false);
    emit(related, related_s, related_c, false);
    emit(exp, exp_s, exp_c, false);
    emit(exp, table_s, table_c, true);
    b.paragraph(3, {"we conclude"});
    out.push_back(b.build());
  }
  return out;
}

std::vector<PaperDoc> separable_fixture() {
  std::vector<PaperDoc> out;
  for (int p = 0; p < 4; ++p) {
    DocBuilder b(fmt::format("S{}", p), 2014);
    b.title(fmt::format("Learning to parse sentences variant {}", p));
    b.abstract("we present a parser and evaluate it on standard benchmarks");
    b.split(p < 3 ? SplitTag::kTrain : SplitTag::kDev);
    const int intro = b.section("Introduction");
    b.paragraph(intro, {"parsing is a core task in language processing"});
    const int exp = b.section("Experiments");
    std::vector<std::string> prose;
    std::vector<std::string> table;
    for (int k = 0; k < 8; ++k) {
      prose.push_back(fmt::format("we train on the standard split following @s{}r{} closely", p, k));
      if (k % 2 == 0) table.push_back(fmt::format("@s{}r{} 90.{} 88.{}", p, k, k, k));
    }
    const int prose_par = b.paragraph(exp, prose);
    const int table_par = b.paragraph(exp, table);
    for (std::size_t i = 0; i < table.size(); ++i) b.mark_table(exp, table_par, static_cast<int>(i));
    for (int k = 0; k < 8; ++k) {
      const std::string id = fmt::format("s{}r{}", p, k);
      b.reference(id, k % 2 == 0 ? Label::kBaseline : Label::kNonBaseline);
      b.cite(id, exp, prose_par, k, 7);
      if (k % 2 == 0) b.cite(id, exp, table_par, k / 2, 0);
    }
    out.push_back(b.build());
  }
  return out;
}

FilterFixture filter_fixture() {
  struct Case {
    const char* title;
    const char* venue;
  };
  // Indexed like default_filter_keywords().
  static const Case kBanned[] = {
      {"Sentiment lexicons for tweets", "Proceedings of ACL (Short Papers)"},
      {"Morphology for low resource languages", "Proceedings of the Third Workshop on Tagging"},
      {"An interactive Demo of a parser", "Proceedings of ACL"},
      {"Tutorial: Structured prediction", "Proceedings of NAACL"},
      {"Query expansion revisited", "COLING 2010: Poster Volume"},
      {"Translation memory integration", "EAMT Project Notes"},
      {"Overview of the Shared Task on NER", "Proceedings of CoNLL"},
      {"Thesis plan on discourse parsing", "ACL Doctoral Consortium"},
      {"Dialogue act tagging", "Companion Volume of HLT-NAACL"},
      {"Live coreference browsing", "ACL Interactive Presentation Sessions"},
  };
  static const Case kControls[] = {
      {"Minimum error rate training in statistical machine translation", "Proceedings of ACL"},
      {"A maximum entropy approach to natural language processing", "Computational Linguistics"},
      {"Shortest derivation parsing", "Proceedings of EMNLP"},
      {"Tutor dialogue strategies for learners", "Proceedings of NAACL"},
      {"Paper trails of citation networks", "Proceedings of COLING"},
      {"Sharing tasks across languages with multitask learning", "Transactions of the ACL"},
  };
  FilterFixture f;
  int i = 0;
  for (const auto& c : kBanned) {
    DocBuilder b(fmt::format("ban{:02}", i++));
    b.title(c.title).venue(c.venue);
    f.docs.push_back(b.build());
    f.banned_ids.push_back(f.docs.back().paper_id);
  }
  i = 0;
  for (const auto& c : kControls) {
    DocBuilder b(fmt::format("keep{:02}", i++));
    b.title(c.title).venue(c.venue);
    f.docs.push_back(b.build());
    f.control_ids.push_back(f.docs.back().paper_id);
  }
  return f;
}

KappaFixture kappa_fixture() {
  KappaFixture k;
  Rng rng(4040);
  for (int i = 0; i < 40; ++i) {
    const Label a = rng.uniform() < 0.3 ? Label::kBaseline : Label::kNonBaseline;
    Label b = a;
    if (rng.uniform() < 0.2) b = a == Label::kBaseline ? Label::kNonBaseline : Label::kBaseline;
    k.a.push_back(a);
    k.b.push_back(b);
  }
  return k;
}

TempDir::TempDir(const std::string& tag) {
  static std::uint64_t counter = 0;
  Rng rng(static_cast<std::uint64_t>(std::random_device{}()) ^ ++counter);
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = std::filesystem::temp_directory_path() /
                     fmt::format("{}-{:016x}", tag, rng.next());
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace bscope::testing
